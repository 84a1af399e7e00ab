use super::{CubeFamily, Weight, WeightClass};
use crate::error::{Error, Result};
use crate::grid::{Cube, GridFunction, GridSpec};
use crate::operators::hl_maximal;

/// Closed-form weight descriptions that can be resampled on any grid.
///
/// Grammar: `one`, `const:c`, `power:a` for `|x|^a`, `maxpow:θ` for
/// `M(χ_{[0,1]^n})^θ` computed with the grid maximal operator.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightSpec {
    Constant(f64),
    Power(f64),
    MaximalPower(f64),
}

impl WeightSpec {
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "one" || s == "1" {
            return Ok(WeightSpec::Constant(1.0));
        }
        let (head, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("weight `{s}`: expected kind:value")))?;
        let v: f64 = arg
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("weight `{s}`: bad number `{arg}`")))?;
        match head.trim() {
            "const" if v > 0.0 => Ok(WeightSpec::Constant(v)),
            "power" => Ok(WeightSpec::Power(v)),
            "maxpow" => Ok(WeightSpec::MaximalPower(v)),
            other => Err(Error::Parse(format!("weight `{s}`: unknown kind `{other}`"))),
        }
    }

    pub fn sample(&self, spec: &GridSpec) -> Result<Weight> {
        match *self {
            WeightSpec::Constant(c) => Weight::new(GridFunction::constant(spec, c)),
            WeightSpec::Power(a) => {
                let dim = spec.dim();
                Weight::from_fn(spec, |x| {
                    let r2: f64 = x[..dim].iter().map(|v| v * v).sum();
                    r2.powf(0.5 * a)
                })
            }
            WeightSpec::MaximalPower(theta) => {
                let corner = vec![0.0; spec.dim()];
                let chi = GridFunction::indicator(spec, &Cube::new(&corner, 1.0)?);
                let m = hl_maximal(&chi);
                Weight::new(m.map(|v| v.powf(theta))?)
            }
        }
    }

    /// `w^e` in closed form, when the family is closed under powers.
    pub fn pow(&self, e: f64) -> Self {
        match *self {
            WeightSpec::Constant(c) => WeightSpec::Constant(c.powf(e)),
            WeightSpec::Power(a) => WeightSpec::Power(a * e),
            WeightSpec::MaximalPower(t) => WeightSpec::MaximalPower(t * e),
        }
    }

    /// Exact `r_w` for the closed forms where it is classical:
    /// `|x|^a ∈ A_r` iff `-n < a < n(r-1)`.
    pub fn known_rw(&self, dim: usize) -> Option<f64> {
        match *self {
            WeightSpec::Constant(_) => Some(1.0),
            WeightSpec::Power(a) if a > -(dim as f64) => Some((1.0 + a / dim as f64).max(1.0)),
            WeightSpec::MaximalPower(t) if (0.0..1.0).contains(&t) => Some(1.0),
            _ => None,
        }
    }
}

impl std::fmt::Display for WeightSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            WeightSpec::Constant(c) if *c == 1.0 => write!(f, "one"),
            WeightSpec::Constant(c) => write!(f, "const:{c}"),
            WeightSpec::Power(a) => write!(f, "power:{a}"),
            WeightSpec::MaximalPower(t) => write!(f, "maxpow:{t}"),
        }
    }
}

/// One point of a refinement trend.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrendPoint {
    /// `log2(1/h)`.
    pub level: i32,
    pub h: f64,
    pub value: f64,
}

/// Constant of `class` for `ws` sampled on `base` refined `0..levels`
/// times, each with its standard cube family.
pub fn constant_trend(
    ws: &WeightSpec,
    class: WeightClass,
    base: &GridSpec,
    levels: u32,
) -> Result<Vec<TrendPoint>> {
    class.validate()?;
    (0..levels)
        .map(|l| {
            let g = base.refined(l);
            let w = ws.sample(&g)?;
            let fam = CubeFamily::standard(&g);
            Ok(TrendPoint {
                level: (1.0 / g.h()).log2().round() as i32,
                h: g.h(),
                value: w.constant(class, &fam)?,
            })
        })
        .collect()
}

/// Outcome of the divergence protocol applied to a refinement trend.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Growth {
    Bounded,
    Diverging,
    Indeterminate,
}

/// Increment ratio at or above which growth is not settling down.
pub const INCREMENT_RATIO: f64 = 0.97;

/// Classifies a refinement trend by its increments `D_l = v_{l+1} - v_l`.
///
/// A convergent discretization has geometrically shrinking increments,
/// while any power-law or logarithmic blow-up has increments that do not
/// shrink. The trend is diverging when the last two increment ratios are
/// both at least [`INCREMENT_RATIO`] with positive increments, bounded
/// when the last increment is negligible or both ratios are below it,
/// and indeterminate otherwise. Needs at least four values.
pub fn classify_growth(values: &[f64]) -> Growth {
    if values.iter().any(|v| !v.is_finite()) {
        return Growth::Diverging;
    }
    if values.len() < 4 {
        return Growth::Indeterminate;
    }
    let n = values.len();
    let d: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
    let scale = values[n - 1].abs().max(1.0);
    let negligible = |x: f64| x.abs() <= 1e-9 * scale;
    let (d0, d1, d2) = (d[d.len() - 3], d[d.len() - 2], d[d.len() - 1]);
    if negligible(d2) {
        return Growth::Bounded;
    }
    let r1 = if negligible(d0) { f64::INFINITY } else { d1 / d0 };
    let r2 = if negligible(d1) { f64::INFINITY } else { d2 / d1 };
    if d1 > 0.0 && d2 > 0.0 && r1 >= INCREMENT_RATIO && r2 >= INCREMENT_RATIO {
        Growth::Diverging
    } else if r1.abs() < INCREMENT_RATIO && r2.abs() < INCREMENT_RATIO {
        Growth::Bounded
    } else {
        Growth::Indeterminate
    }
}

/// The literal doubling rule: the value at least doubles at each of the
/// last two refinements.
pub fn doubles_per_level(values: &[f64]) -> bool {
    let n = values.len();
    n >= 3 && values[n - 1] >= 2.0 * values[n - 2] && values[n - 2] >= 2.0 * values[n - 3]
}

/// Result of [`rw_estimate`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RwEstimate {
    Value(f64),
    /// The protocol could not separate bounded from diverging inside this
    /// bracket.
    Interval(f64, f64),
}

impl RwEstimate {
    pub fn midpoint(&self) -> f64 {
        match *self {
            RwEstimate::Value(v) => v,
            RwEstimate::Interval(a, b) => 0.5 * (a + b),
        }
    }
}

/// Refinement levels used by [`rw_estimate`].
pub const RW_LEVELS: u32 = 5;

/// Estimates `r_w = inf{r >= 1 : w ∈ A_r}` by bisection on `r`, deciding
/// membership with [`classify_growth`] over [`RW_LEVELS`] refinements of
/// `base`.
pub fn rw_estimate(ws: &WeightSpec, base: &GridSpec, tol: f64) -> Result<RwEstimate> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {tol}")));
    }
    let grids: Vec<GridSpec> = (0..RW_LEVELS).map(|l| base.refined(l)).collect();
    let weights: Vec<Weight> = grids.iter().map(|g| ws.sample(g)).collect::<Result<_>>()?;
    let families: Vec<CubeFamily> = grids.iter().map(CubeFamily::standard).collect();
    let growth = |class: WeightClass| -> Result<Growth> {
        let vals: Vec<f64> = weights
            .iter()
            .zip(&families)
            .map(|(w, f)| w.constant(class, f))
            .collect::<Result<_>>()?;
        Ok(classify_growth(&vals))
    };
    if growth(WeightClass::A1)? == Growth::Bounded {
        return Ok(RwEstimate::Value(1.0));
    }
    let mut lo = 1.0;
    let mut hi = 2.0;
    loop {
        match growth(WeightClass::Ap(hi))? {
            Growth::Bounded => break,
            _ if hi >= 64.0 => return Ok(RwEstimate::Interval(hi, f64::INFINITY)),
            _ => {
                lo = hi;
                hi *= 2.0;
            }
        }
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match growth(WeightClass::Ap(mid))? {
            Growth::Bounded => hi = mid,
            Growth::Diverging => lo = mid,
            Growth::Indeterminate => return Ok(RwEstimate::Interval(lo, hi)),
        }
    }
    Ok(RwEstimate::Value(0.5 * (lo + hi)))
}
