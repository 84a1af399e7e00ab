use super::config::{Check, Target};
use crate::atoms::Space;
use crate::error::Result;
use crate::grid::{GridSpec, MollifierSpec};
use crate::varlebesgue::ExponentFunction;
use crate::weights::{CubeFamily, Weight, WeightClass};

/// Everything a checker needs on one refinement level, built once and
/// shared by all instances.
#[derive(Clone, Debug)]
pub struct LevelData {
    pub level: u32,
    pub grid: GridSpec,
    /// Fixed by the coarsest grid so that `M_φ` is the same operator on
    /// every level.
    pub phi: MollifierSpec,
    /// `L^p(w)` or `L^{p(·)}`.
    pub source: Space,
    /// `L^q(w^q)` or `L^{q(·)}` for fractional targets, else `source`.
    pub target: Space,
    pub exponent: Option<ExponentFunction>,
}

/// `q(·)` with `1/p(·) - 1/q(·) = α/n`.
pub fn fractional_exponent(p: &ExponentFunction, alpha: f64, n: usize) -> Result<ExponentFunction> {
    let s = alpha / n as f64;
    p.map(|v| 1.0 / (1.0 / v - s))
}

impl LevelData {
    pub fn new(check: &Check, level: u32) -> Result<Self> {
        let grid = check.base.refined(level);
        let phi = MollifierSpec::for_grid(&check.base);
        let t = check.target();
        let n = grid.dim();
        let (source, target, exponent) = if t.is_variable() {
            let e = check.exponent_on(&grid)?;
            let target = if t.is_fractional() {
                Space::Variable(fractional_exponent(&e, check.alpha, n)?)
            } else {
                Space::Variable(e.clone())
            };
            (Space::Variable(e.clone()), target, Some(e))
        } else if t.is_fractional() {
            let wp = check.weight.pow(check.p).sample(&grid)?;
            let wq = check.weight.pow(check.q).sample(&grid)?;
            (
                Space::Weighted { p: check.p, w: wp },
                Space::Weighted { p: check.q, w: wq },
                None,
            )
        } else {
            let w = check.weight.sample(&grid)?;
            let s = Space::Weighted { p: check.p, w };
            (s.clone(), s, None)
        };
        Ok(Self {
            level,
            grid,
            phi,
            source,
            target,
            exponent,
        })
    }

    fn weight(&self) -> Option<&Weight> {
        match &self.source {
            Space::Weighted { w, .. } => Some(w),
            Space::Variable(_) => None,
        }
    }
}

/// Hypothesis constants of `check` on one level, by name.
pub fn hypotheses(check: &Check, data: &LevelData) -> Result<Vec<(String, f64)>> {
    let t = check.target();
    if let Some(e) = &data.exponent {
        let lh = e.lh_constants();
        return Ok(vec![("LH C0".into(), lh.c0), ("LH Cinf".into(), lh.c_inf)]);
    }
    let Some(w) = data.weight() else {
        return Ok(Vec::new());
    };
    let family = CubeFamily::standard(&data.grid);
    let (p, q) = (check.p, check.q);
    let class = match t {
        Target::L4_1 => WeightClass::Ap(p),
        // `w` here is the sampled `w^p`, and `w ∈ A_{p,q}` iff
        // `w^q ∈ A_{1+q/p'}`; the A_{p,q} constant needs `w` itself
        Target::L4_3 => {
            let w1 = check.weight.sample(&data.grid)?;
            let c = w1.constant(WeightClass::Apq(p, q), &family)?;
            return Ok(vec![(format!("{}", WeightClass::Apq(p, q)), c)]);
        }
        Target::R4_5 => WeightClass::Ap((2.0 * p).max(2.0)),
        Target::L4_6 if p == 1.0 => WeightClass::RhInf,
        Target::L4_6 => WeightClass::Rh(1.0 / (1.0 - p)),
        Target::L4_7 => WeightClass::Rh(q / (q - p)),
        Target::L4_9 | Target::T1_3 => WeightClass::Rh(q / p),
        Target::T1_1 | Target::T1_5 => WeightClass::Ap(check.rw()? + 1.0),
        _ => return Ok(Vec::new()),
    };
    Ok(vec![(format!("{class}"), w.constant(class, &family)?)])
}
