//! Grid function serialization.
//!
//! Binary layout, all little-endian: `n` as u64, then `n` pairs `(lo, hi)`
//! as f64, then `h` as f64, then the samples as f64 in row-major order.
//! The CSV form has a header row and one line per cell: `x,value` in 1D,
//! `x,y,value` in 2D.

use std::io::{Read, Write};
use std::path::Path;

use super::{GridFunction, GridSpec};
use crate::error::{Error, Result};

pub fn write_binary(f: &GridFunction, mut w: impl Write) -> Result<()> {
    let spec = f.spec();
    w.write_all(&(spec.dim() as u64).to_le_bytes())?;
    for a in 0..spec.dim() {
        w.write_all(&spec.lo(a).to_le_bytes())?;
        w.write_all(&spec.hi(a).to_le_bytes())?;
    }
    w.write_all(&spec.h().to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * f.samples().len());
    for v in f.samples() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

pub fn read_binary(mut r: impl Read) -> Result<GridFunction> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let dim = u64::from_le_bytes(b) as usize;
    if !(1..=2).contains(&dim) {
        return Err(Error::Parse(format!("grid header: dimension {dim}")));
    }
    let mut lo = vec![0.0; dim];
    let mut hi = vec![0.0; dim];
    for a in 0..dim {
        lo[a] = read_f64(&mut r)?;
        hi[a] = read_f64(&mut r)?;
    }
    let h = read_f64(&mut r)?;
    let spec = GridSpec::new(&lo, &hi, h)?;
    let mut raw = Vec::new();
    r.read_to_end(&mut raw)?;
    if raw.len() != 8 * spec.len() {
        return Err(Error::Parse(format!(
            "grid payload has {} bytes, expected {}",
            raw.len(),
            8 * spec.len()
        )));
    }
    let samples = raw
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    GridFunction::new(spec, samples)
}

pub fn save_binary(f: &GridFunction, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_binary(f, std::io::BufWriter::new(file))
}

pub fn load_binary(path: impl AsRef<Path>) -> Result<GridFunction> {
    let file = std::fs::File::open(path)?;
    read_binary(std::io::BufReader::new(file))
}

pub fn write_csv(f: &GridFunction, w: impl Write) -> Result<()> {
    let spec = f.spec();
    let mut out = csv::Writer::from_writer(w);
    if spec.dim() == 1 {
        out.write_record(["x", "value"])?;
    } else {
        out.write_record(["x", "y", "value"])?;
    }
    for (k, v) in f.samples().iter().enumerate() {
        let p = spec.point(k);
        if spec.dim() == 1 {
            out.write_record(&[p[0].to_string(), v.to_string()])?;
        } else {
            out.write_record(&[p[0].to_string(), p[1].to_string(), v.to_string()])?;
        }
    }
    out.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`] back onto `spec`. Rows may come in
/// any order; every cell must be present exactly once.
pub fn read_csv(spec: &GridSpec, r: impl Read) -> Result<GridFunction> {
    let mut rdr = csv::Reader::from_reader(r);
    let mut samples = vec![f64::NAN; spec.len()];
    for rec in rdr.records() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("csv row: {e}")))?;
        if vals.len() != spec.dim() + 1 {
            return Err(Error::Parse(format!("csv row has {} fields", vals.len())));
        }
        let k = spec
            .cell_of(&vals[..spec.dim()])
            .ok_or_else(|| Error::Parse("csv point outside the box".into()))?;
        samples[k] = vals[spec.dim()];
    }
    GridFunction::new(spec.clone(), samples)
}
