use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::grid::{Cube, GridFunction, GridSpec};

/// Variable exponent `p(·)` sampled on a grid, with `p_-` and `p_+`
/// cached and the log-Hölder constants computed on first use.
#[derive(Clone, Debug)]
pub struct ExponentFunction {
    p: GridFunction,
    p_minus: f64,
    p_plus: f64,
    lh: OnceLock<LhConstants>,
}

/// Log-Hölder constants: `|p(x)-p(y)| <= C_0 / (-log|x-y|)` for
/// `|x-y| < 1/2` and `|p(x) - p_∞| <= C_∞ / log(e + |x|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LhConstants {
    pub c0: f64,
    pub c_inf: f64,
    pub p_inf: f64,
}

/// Number of candidate limits `p_∞` scanned when fitting `C_∞`.
pub const P_INF_CANDIDATES: usize = 512;

impl ExponentFunction {
    pub fn new(p: GridFunction) -> Result<Self> {
        if let Some(k) = p.samples().iter().position(|&v| !(v > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "exponent must be positive; sample {k} is {}",
                p.samples()[k]
            )));
        }
        let p_minus = p.min();
        let p_plus = p.max();
        Ok(Self {
            p,
            p_minus,
            p_plus,
            lh: OnceLock::new(),
        })
    }

    pub fn constant(spec: &GridSpec, p0: f64) -> Result<Self> {
        if !(p0 > 0.0 && p0.is_finite()) {
            return Err(Error::InvalidParameter(format!("constant exponent {p0}")));
        }
        Self::new(GridFunction::constant(spec, p0))
    }

    pub fn from_fn(spec: &GridSpec, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Self::new(GridFunction::from_fn(spec, f)?)
    }

    pub fn function(&self) -> &GridFunction {
        &self.p
    }

    pub fn spec(&self) -> &GridSpec {
        self.p.spec()
    }

    pub fn samples(&self) -> &[f64] {
        self.p.samples()
    }

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    pub fn lh_constants(&self) -> LhConstants {
        *self.lh.get_or_init(|| compute_lh(&self.p, self.p_minus, self.p_plus))
    }

    /// Pointwise `f(p(x))`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.p.map(f)?)
    }

    /// `p'(x) = p(x) / (p(x) - 1)`; needs `p_- > 1`.
    pub fn conjugate(&self) -> Result<Self> {
        if !(self.p_minus > 1.0) {
            return Err(Error::InvalidParameter(format!(
                "conjugate exponent needs p_- > 1, got {}",
                self.p_minus
            )));
        }
        self.map(|v| v / (v - 1.0))
    }

    /// `p(x) / c`.
    pub fn ratio(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponent divisor {c}")));
        }
        self.map(|v| v / c)
    }

    /// `c p(x)`.
    pub fn times(&self, c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("exponent factor {c}")));
        }
        self.map(|v| v * c)
    }
}

/// Offsets (in cells) used for the `C_0` pair scan: every offset up to 32,
/// then a geometric progression of ratio ~1.03, then the largest offset
/// below the distance 1/2.
fn pair_offsets(max_cells: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 1usize;
    while d <= max_cells {
        out.push(d);
        d = if d < 32 { d + 1 } else { (d * 103).div_ceil(100) };
    }
    if out.last().is_some_and(|&l| l < max_cells) {
        out.push(max_cells);
    }
    out
}

fn compute_lh(p: &GridFunction, p_minus: f64, p_plus: f64) -> LhConstants {
    let spec = p.spec();
    let h = spec.h();
    let v = p.samples();
    let [n0, n1] = spec.shape();
    // distance must stay strictly below 1/2
    let max_cells = ((0.5 / h).ceil() as usize).saturating_sub(1);
    let offs = pair_offsets(max_cells);
    let mut c0 = 0.0f64;
    let mut visit = |a: usize, b: usize, dist: f64| {
        if dist < 0.5 {
            let d = (v[a] - v[b]).abs() * (-dist.ln());
            if d > c0 {
                c0 = d;
            }
        }
    };
    if spec.dim() == 1 {
        for &d in &offs {
            for i in 0..n0.saturating_sub(d) {
                visit(i, i + d, d as f64 * h);
            }
        }
    } else {
        let mut dirs: Vec<(i64, i64)> = Vec::new();
        for &d in &offs {
            let d = d as i64;
            dirs.extend([(d, 0), (0, d), (d, d), (d, -d)]);
        }
        for (d0, d1) in dirs {
            let dist = ((d0 * d0 + d1 * d1) as f64).sqrt() * h;
            for i in 0..n0 {
                let i2 = i as i64 + d0;
                if i2 < 0 || i2 >= n0 as i64 {
                    continue;
                }
                for j in 0..n1 {
                    let j2 = j as i64 + d1;
                    if j2 < 0 || j2 >= n1 as i64 {
                        continue;
                    }
                    visit(i * n1 + j, i2 as usize * n1 + j2 as usize, dist);
                }
            }
        }
    }
    let logs: Vec<f64> = (0..spec.len())
        .map(|k| {
            let x = spec.point(k);
            let r = (x[0] * x[0] + if spec.dim() == 2 { x[1] * x[1] } else { 0.0 }).sqrt();
            (std::f64::consts::E + r).ln()
        })
        .collect();
    let mut best = (f64::INFINITY, p_minus);
    for i in 0..P_INF_CANDIDATES {
        let cand = if P_INF_CANDIDATES == 1 {
            p_minus
        } else {
            p_minus + (p_plus - p_minus) * i as f64 / (P_INF_CANDIDATES - 1) as f64
        };
        let c = v
            .iter()
            .zip(&logs)
            .map(|(pv, l)| (pv - cand).abs() * l)
            .fold(0.0, f64::max);
        if c < best.0 {
            best = (c, cand);
        }
    }
    LhConstants {
        c0,
        c_inf: best.0,
        p_inf: best.1,
    }
}

/// Closed-form exponent descriptions.
///
/// Grammar: `const:c`; `log:c1,c2` for `c1 + c2 / log(e + |x|)`;
/// `piecewise:base;[a,b]=v;...` (2D cubes as `[a,b]x[c,d]=v`), optionally
/// followed by `;blend=w` to replace each jump by a linear ramp of width
/// `w` outside the cube.
#[derive(Clone, Debug, PartialEq)]
pub enum ExponentSpec {
    Constant(f64),
    Log(f64, f64),
    Piecewise {
        base: f64,
        pieces: Vec<(Cube, f64)>,
        blend: f64,
    },
}

fn num(s: &str, ctx: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("exponent `{ctx}`: bad number `{s}`")))
}

fn interval(s: &str, ctx: &str) -> Result<(f64, f64)> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| Error::Parse(format!("exponent `{ctx}`: expected [a,b], got `{s}`")))?;
    let (a, b) = inner
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("exponent `{ctx}`: expected [a,b], got `{s}`")))?;
    Ok((num(a, ctx)?, num(b, ctx)?))
}

impl ExponentSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("exponent `{s}`: expected kind:args")))?;
        match head.trim() {
            "const" => Ok(ExponentSpec::Constant(num(rest, s)?)),
            "log" => {
                let (a, b) = rest
                    .split_once(',')
                    .ok_or_else(|| Error::Parse(format!("exponent `{s}`: expected log:c1,c2")))?;
                Ok(ExponentSpec::Log(num(a, s)?, num(b, s)?))
            }
            "piecewise" => {
                let mut parts = rest.split(';');
                let base = num(parts.next().unwrap_or(""), s)?;
                let mut pieces = Vec::new();
                let mut blend = 0.0;
                for part in parts {
                    let part = part.trim();
                    if let Some(w) = part.strip_prefix("blend=") {
                        blend = num(w, s)?;
                        continue;
                    }
                    let (geom, val) = part
                        .rsplit_once('=')
                        .ok_or_else(|| Error::Parse(format!("exponent `{s}`: piece `{part}`")))?;
                    let axes: Vec<&str> = geom.split('x').collect();
                    let cube = match axes.as_slice() {
                        [a] => {
                            let (lo, hi) = interval(a, s)?;
                            Cube::interval(lo, hi)?
                        }
                        [a, b] => {
                            let (l0, h0) = interval(a, s)?;
                            let (l1, h1) = interval(b, s)?;
                            if ((h0 - l0) - (h1 - l1)).abs() > 1e-12 {
                                return Err(Error::Parse(format!(
                                    "exponent `{s}`: `{geom}` is not a square"
                                )));
                            }
                            Cube::new(&[l0, l1], h0 - l0)?
                        }
                        _ => return Err(Error::Parse(format!("exponent `{s}`: piece `{part}`"))),
                    };
                    pieces.push((cube, num(val, s)?));
                }
                Ok(ExponentSpec::Piecewise {
                    base,
                    pieces,
                    blend,
                })
            }
            other => Err(Error::Parse(format!("exponent `{s}`: unknown kind `{other}`"))),
        }
    }

    /// `p(x)` at a point.
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            ExponentSpec::Constant(c) => *c,
            ExponentSpec::Log(c1, c2) => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                c1 + c2 / (std::f64::consts::E + r).ln()
            }
            ExponentSpec::Piecewise {
                base,
                pieces,
                blend,
            } => {
                let mut v = *base;
                for (q, pv) in pieces {
                    let weight = if *blend > 0.0 {
                        // sup-distance to the cube
                        let d = (0..q.dim())
                            .map(|a| ((x[a] - q.center()[a]).abs() - 0.5 * q.side()).max(0.0))
                            .fold(0.0, f64::max);
                        (1.0 - d / blend).max(0.0)
                    } else if q.contains(x) {
                        1.0
                    } else {
                        0.0
                    };
                    if weight > 0.0 {
                        v += weight * (pv - v);
                    }
                }
                v
            }
        }
    }

    pub fn sample(&self, spec: &GridSpec) -> Result<ExponentFunction> {
        let dim = spec.dim();
        ExponentFunction::from_fn(spec, |x| self.value(&x[..dim]))
    }
}

impl std::fmt::Display for ExponentSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExponentSpec::Constant(c) => write!(f, "const:{c}"),
            ExponentSpec::Log(a, b) => write!(f, "log:{a},{b}"),
            ExponentSpec::Piecewise {
                base,
                pieces,
                blend,
            } => {
                write!(f, "piecewise:{base}")?;
                for (q, v) in pieces {
                    let c = q.corner();
                    let s = q.side();
                    let axes: Vec<String> = c.iter().map(|lo| format!("[{lo},{}]", lo + s)).collect();
                    write!(f, ";{}={v}", axes.join("x"))?;
                }
                if *blend > 0.0 {
                    write!(f, ";blend={blend}")?;
                }
                Ok(())
            }
        }
    }
}
