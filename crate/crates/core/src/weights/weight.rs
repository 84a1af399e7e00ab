use std::collections::HashMap;
use std::sync::Mutex;

use rayon::prelude::*;

use super::CubeFamily;
use crate::error::{Error, Result};
use crate::grid::{window_extreme, BoxSums, GridFunction, GridSpec};

/// Floor applied to weight samples before raising them to a negative power.
pub const WEIGHT_FLOOR: f64 = 1e-300;

/// Strictly positive sampled weight with a cache of computed constants.
#[derive(Debug)]
pub struct Weight {
    w: GridFunction,
    cache: Mutex<HashMap<String, f64>>,
}

impl Clone for Weight {
    fn clone(&self) -> Self {
        let cache = self.cache.lock().expect("cache lock").clone();
        Self {
            w: self.w.clone(),
            cache: Mutex::new(cache),
        }
    }
}

/// Weight classes whose constants are maxima over a cube family.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WeightClass {
    /// `A_p`, `p > 1`.
    Ap(f64),
    A1,
    /// `RH_s`, `s > 1`.
    Rh(f64),
    RhInf,
    /// `A_{p,q}`; `p = 1` uses the essential-infimum form.
    Apq(f64, f64),
}

impl WeightClass {
    fn key(&self) -> String {
        match self {
            WeightClass::Ap(p) => format!("ap:{p:e}"),
            WeightClass::A1 => "a1".into(),
            WeightClass::Rh(s) => format!("rh:{s:e}"),
            WeightClass::RhInf => "rhinf".into(),
            WeightClass::Apq(p, q) => format!("apq:{p:e}:{q:e}"),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        match *self {
            WeightClass::Ap(p) if !(p > 1.0 && p.is_finite()) => bad(format!("A_p needs p > 1, got {p}")),
            WeightClass::Rh(s) if !(s > 1.0 && s.is_finite()) => bad(format!("RH_s needs s > 1, got {s}")),
            WeightClass::Apq(p, q) if !(p >= 1.0 && q > 1.0 && p.is_finite() && q.is_finite()) => {
                bad(format!("A_(p,q) needs p >= 1 and q > 1, got p={p}, q={q}"))
            }
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for WeightClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightClass::Ap(p) => write!(f, "A_{p}"),
            WeightClass::A1 => write!(f, "A_1"),
            WeightClass::Rh(s) => write!(f, "RH_{s}"),
            WeightClass::RhInf => write!(f, "RH_inf"),
            WeightClass::Apq(p, q) => write!(f, "A_({p},{q})"),
        }
    }
}

fn pow_floor(v: f64, e: f64) -> f64 {
    v.max(WEIGHT_FLOOR).powf(e)
}

/// Per-side data shared by every cube of that side.
struct SideTables {
    dim: usize,
    side: usize,
    shape: [usize; 2],
    ext: Vec<f64>,
}

impl Weight {
    pub fn new(w: GridFunction) -> Result<Self> {
        if let Some(k) = w.samples().iter().position(|&v| v <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "weight must be strictly positive; sample {k} is {}",
                w.samples()[k]
            )));
        }
        Ok(Self {
            w,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn from_fn(spec: &GridSpec, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        Self::new(GridFunction::from_fn(spec, f)?)
    }

    pub fn unit(spec: &GridSpec) -> Self {
        Self::new(GridFunction::constant(spec, 1.0)).expect("positive")
    }

    pub fn function(&self) -> &GridFunction {
        &self.w
    }

    pub fn spec(&self) -> &GridSpec {
        self.w.spec()
    }

    /// `w^e`, with the sample floor applied.
    pub fn powf(&self, e: f64) -> Result<Weight> {
        Weight::new(self.w.map(|v| pow_floor(v, e))?)
    }

    /// `c w`.
    pub fn scale(&self, c: f64) -> Result<Weight> {
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!("weight scale {c}")));
        }
        Weight::new(self.w.scale(c))
    }

    /// Constant of `class` over `family`; `+∞` signals overflow.
    pub fn constant(&self, class: WeightClass, family: &CubeFamily) -> Result<f64> {
        class.validate()?;
        if family.spec() != self.spec() {
            return Err(Error::SpecMismatch);
        }
        let key = format!("{}|{}", class.key(), family.descriptor());
        if let Some(v) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(*v);
        }
        let v = self.compute(class, family);
        self.cache.lock().expect("cache lock").insert(key, v);
        Ok(v)
    }

    fn compute(&self, class: WeightClass, family: &CubeFamily) -> f64 {
        let spec = self.spec();
        let dim = spec.dim();
        let w = self.w.samples();
        let transformed = |e: f64| -> BoxSums {
            let v: Vec<f64> = w.iter().map(|&x| pow_floor(x, e)).collect();
            BoxSums::from_samples(spec, &v)
        };
        let sw = BoxSums::from_samples(spec, w);
        // second sum and whether a per-side extreme of w is needed
        let (second, extreme): (Option<BoxSums>, Option<bool>) = match class {
            WeightClass::Ap(p) => (Some(transformed(1.0 - p / (p - 1.0))), None),
            WeightClass::A1 => (None, Some(false)),
            WeightClass::Rh(s) => (Some(transformed(s)), None),
            WeightClass::RhInf => (None, Some(true)),
            WeightClass::Apq(p, q) => (Some(transformed(q)), (p == 1.0).then_some(false)),
        };
        let third = match class {
            WeightClass::Apq(p, _) if p > 1.0 => Some(transformed(-p / (p - 1.0))),
            _ => None,
        };
        let per_side: Vec<f64> = family
            .groups()
            .par_iter()
            .map(|g| {
                let side = g.side;
                let cells = (side as f64).powi(dim as i32);
                let tables = extreme.map(|take_max| {
                    let (ext, shape) = window_extreme(w, spec.shape(), dim, side, take_max);
                    SideTables {
                        dim,
                        side,
                        shape,
                        ext,
                    }
                });
                let mut best = 1.0f64;
                for st in &g.starts {
                    let e1 = if dim == 2 { st[1] + side } else { 1 };
                    let block = |s: &BoxSums| s.block(st[0], st[0] + side, st[1], e1) / cells;
                    let ext_at = || {
                        let t = tables.as_ref().expect("extreme table");
                        debug_assert_eq!(t.side, side);
                        let m1 = if t.dim == 2 { t.shape[1] } else { 1 };
                        t.ext[st[0] * m1 + if t.dim == 2 { st[1] } else { 0 }]
                    };
                    let avg_w = block(&sw);
                    let v = match class {
                        WeightClass::Ap(p) => {
                            avg_w * block(second.as_ref().expect("table")).powf(p - 1.0)
                        }
                        WeightClass::A1 => avg_w / ext_at().max(WEIGHT_FLOOR),
                        WeightClass::Rh(s) => {
                            block(second.as_ref().expect("table")).powf(1.0 / s) / avg_w
                        }
                        WeightClass::RhInf => ext_at() / avg_w,
                        WeightClass::Apq(p, q) => {
                            let a = block(second.as_ref().expect("table")).powf(1.0 / q);
                            if p == 1.0 {
                                a / ext_at().max(WEIGHT_FLOOR)
                            } else {
                                let pp = p / (p - 1.0);
                                a * block(third.as_ref().expect("table")).powf(1.0 / pp)
                            }
                        }
                    };
                    if v.is_nan() || v == f64::INFINITY {
                        return f64::INFINITY;
                    }
                    best = best.max(v);
                }
                best
            })
            .collect();
        per_side.into_iter().fold(1.0, f64::max)
    }
}

/// `[w]_{A_p}` over the family.
pub fn ap_constant(w: &Weight, p: f64, family: &CubeFamily) -> Result<f64> {
    w.constant(WeightClass::Ap(p), family)
}

/// `[w]_{A_1}`: max over cubes and points of `⨍_Q w / w(x)`.
pub fn a1_constant(w: &Weight, family: &CubeFamily) -> Result<f64> {
    w.constant(WeightClass::A1, family)
}

/// `[w]_{RH_s}`: max over cubes of `(⨍_Q w^s)^{1/s} / ⨍_Q w`.
pub fn rh_constant(w: &Weight, s: f64, family: &CubeFamily) -> Result<f64> {
    w.constant(WeightClass::Rh(s), family)
}

/// `[w]_{RH_∞}`: max over cubes and points of `w(x) / ⨍_Q w`.
pub fn rh_inf_constant(w: &Weight, family: &CubeFamily) -> Result<f64> {
    w.constant(WeightClass::RhInf, family)
}

/// `[w]_{A_{p,q}}`: max over cubes of `(⨍ w^q)^{1/q} (⨍ w^{-p'})^{1/p'}`.
pub fn apq_constant(w: &Weight, p: f64, q: f64, family: &CubeFamily) -> Result<f64> {
    w.constant(WeightClass::Apq(p, q), family)
}

/// `(∫ |f|^p w dx)^{1/p}`.
pub fn weighted_lp_norm(f: &GridFunction, p: f64, w: &Weight) -> Result<f64> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("exponent p={p}")));
    }
    f.ensure_same_grid(w.function())?;
    let s: f64 = f
        .samples()
        .iter()
        .zip(w.function().samples())
        .map(|(v, wt)| v.abs().powf(p) * wt)
        .sum();
    Ok((s * f.spec().cell_volume()).powf(1.0 / p))
}
