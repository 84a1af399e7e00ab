//! The Rubio de Francia iteration `R h = Σ_k M^k h / (2B)^k` on a variable
//! Lebesgue space and checks of its four structural properties.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Cube, GridFunction};
use crate::operators::hl_maximal;
use crate::varlebesgue::{luxemburg_norm, ExponentFunction};
use crate::weights::{CubeFamily, Weight, WeightClass, WEIGHT_FLOOR};

/// Headroom applied to the largest observed ratio `‖Mg‖ / ‖g‖`.
pub const OPNORM_HEADROOM: f64 = 1.5;
/// Smallest admissible `B`.
pub const MIN_B: f64 = 1.01;
/// Default truncation depth.
pub const DEFAULT_KMAX: usize = 12;
/// Relative slack on `[Rh]_{A_1} <= 2B`.
pub const A1_SLACK: f64 = 0.1;

/// Empirical upper estimate `B` of `‖M‖` on `L^{r(·)}`.
#[derive(Clone, Debug)]
pub struct MaximalNormEstimate {
    pub exponent: ExponentFunction,
    pub b: f64,
    pub max_ratio: f64,
    /// How the witnesses were generated.
    pub witnesses: String,
}

/// `B = 1.5 max ‖Mg‖_{r(·)} / ‖g‖_{r(·)}` over `functions`.
pub fn estimate_with(r: &ExponentFunction, functions: &[GridFunction], label: &str) -> Result<MaximalNormEstimate> {
    if !(r.p_minus() > 1.0) {
        return Err(Error::Hypothesis(format!(
            "the maximal operator is unbounded on L^r(.) with r_- = {} <= 1",
            r.p_minus()
        )));
    }
    let mut max_ratio = 0.0f64;
    for g in functions {
        let n = luxemburg_norm(g, r)?;
        if n == 0.0 {
            continue;
        }
        max_ratio = max_ratio.max(luxemburg_norm(&hl_maximal(g), r)? / n);
    }
    if max_ratio == 0.0 {
        return Err(Error::InvalidParameter("no nonzero witness function".into()));
    }
    Ok(MaximalNormEstimate {
        exponent: r.clone(),
        b: (OPNORM_HEADROOM * max_ratio).max(MIN_B),
        max_ratio,
        witnesses: label.to_string(),
    })
}

/// Seeded witnesses: indicators of random dyadic cubes and smooth bumps of
/// random centre and width, alternating.
pub fn witness_family(r: &ExponentFunction, count: usize, seed: u64) -> Result<Vec<GridFunction>> {
    let spec = r.spec();
    let dim = spec.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let lo: Vec<f64> = (0..dim).map(|a| spec.lo(a)).collect();
        let hi: Vec<f64> = (0..dim).map(|a| spec.hi(a)).collect();
        let width = (0..dim).map(|a| hi[a] - lo[a]).fold(f64::INFINITY, f64::min);
        if i % 2 == 0 {
            // dyadic side between 4h and a quarter of the box
            let kmax = ((width / 4.0) / (4.0 * spec.h())).log2().floor().max(0.0) as i32;
            let side = 4.0 * spec.h() * 2f64.powi(rng.random_range(0..=kmax));
            let corner: Vec<f64> = (0..dim)
                .map(|a| {
                    let slots = ((hi[a] - lo[a]) / side).floor() as i64;
                    lo[a] + rng.random_range(0..slots.max(1)) as f64 * side
                })
                .collect();
            out.push(GridFunction::indicator(spec, &Cube::new(&corner, side)?));
        } else {
            let c: Vec<f64> = (0..dim).map(|a| rng.random_range(lo[a]..hi[a])).collect();
            let s = rng.random_range(4.0 * spec.h()..width / 4.0);
            out.push(GridFunction::from_fn(spec, |x| {
                let d2: f64 = (0..dim).map(|a| (x[a] - c[a]).powi(2)).sum::<f64>() / (s * s);
                if d2 < 1.0 {
                    (-1.0 / (1.0 - d2)).exp()
                } else {
                    0.0
                }
            })?);
        }
    }
    Ok(out)
}

/// [`estimate_with`] over [`witness_family`]`(r, count, seed)`.
pub fn estimate_maximal_opnorm(r: &ExponentFunction, count: usize, seed: u64) -> Result<MaximalNormEstimate> {
    if !(r.p_minus() > 1.0) {
        return Err(Error::Hypothesis(format!(
            "the maximal operator is unbounded on L^r(.) with r_- = {} <= 1",
            r.p_minus()
        )));
    }
    let fs = witness_family(r, count, seed)?;
    estimate_with(r, &fs, &format!("{count} seeded indicators and bumps, seed {seed}"))
}

/// Denominator convention of the series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormPower {
    /// `(2B)^k`: the standard algorithm, needed for `‖Rh‖ <= 2‖h‖`.
    PerTerm,
    /// `2^k B`, the form displayed with a single power of the norm.
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IterationConfig {
    pub k_max: usize,
    pub b: f64,
    pub power: NormPower,
}

impl IterationConfig {
    pub fn new(b: f64) -> Result<Self> {
        let cfg = Self {
            k_max: DEFAULT_KMAX,
            b,
            power: NormPower::PerTerm,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_max < 1 {
            return Err(Error::InvalidParameter("k_max must be at least 1".into()));
        }
        if !(self.b >= MIN_B && self.b.is_finite()) {
            return Err(Error::InvalidParameter(format!("B = {} is below {MIN_B}", self.b)));
        }
        Ok(())
    }

    fn denominator(&self, k: usize) -> f64 {
        match self.power {
            NormPower::PerTerm => (2.0 * self.b).powi(k as i32),
            NormPower::Single => {
                if k == 0 {
                    1.0
                } else {
                    2f64.powi(k as i32) * self.b
                }
            }
        }
    }
}

/// Truncated series together with the last iterate `M^{k_max} h`.
fn series(h: &GridFunction, cfg: &IterationConfig) -> Result<(GridFunction, GridFunction)> {
    cfg.validate()?;
    if let Some(v) = h.samples().iter().find(|v| **v < 0.0) {
        return Err(Error::InvalidParameter(format!("iteration input must be nonnegative, found {v}")));
    }
    let mut acc = h.clone();
    let mut term = h.clone();
    for k in 1..=cfg.k_max {
        term = hl_maximal(&term);
        let d = cfg.denominator(k);
        acc = acc.zip_with(&term, |a, t| a + t / d)?;
    }
    Ok((acc, term))
}

/// `R h = Σ_{k <= k_max} M^k h / (2B)^k`.
pub fn iterate(h: &GridFunction, cfg: &IterationConfig) -> Result<GridFunction> {
    Ok(series(h, cfg)?.0)
}

/// `R h` and the bound `‖M^{k_max} h‖_{r(·)} B^{-k_max} 2^{-k_max}` on the
/// `L^{r(·)}` norm of the discarded tail, valid when `‖M‖ <= B`.
pub fn iterate_with_tail(h: &GridFunction, cfg: &IterationConfig, r: &ExponentFunction) -> Result<(GridFunction, f64)> {
    let (acc, last) = series(h, cfg)?;
    let k = cfg.k_max as i32;
    let tail = luxemburg_norm(&last, r)? * cfg.b.powi(-k) * 2f64.powi(-k);
    Ok((acc, tail))
}

/// Exponents fixing the two composite weights:
/// `R(h^{τ'})^{1/τ'} ∈ A_1 ∩ RH_{τ'}` and `(Rh)^{p/q} ∈ A_1 ∩ RH_{q/p}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CompositeParams {
    pub tau_prime: f64,
    pub p: f64,
    pub q: f64,
}

impl Default for CompositeParams {
    fn default() -> Self {
        Self {
            tau_prime: 2.0,
            p: 1.0,
            q: 2.0,
        }
    }
}

/// A_1 and RH constants of one composite weight.
#[derive(Clone, Debug, PartialEq)]
pub struct CompositeCheck {
    pub name: String,
    pub a1: f64,
    pub rh_exponent: f64,
    pub rh: f64,
}

impl CompositeCheck {
    pub fn finite(&self) -> bool {
        self.a1.is_finite() && self.rh.is_finite()
    }
}

/// Values behind the four iteration properties.
#[derive(Clone, Debug)]
pub struct IterationReport {
    /// (1) `h <= Rh` pointwise.
    pub dominates: bool,
    /// (2) `‖Rh‖_{r(·)} / ‖h‖_{r(·)}` and its bound `2(1 + 2^{-k_max})`.
    pub norm_ratio: f64,
    pub norm_bound: f64,
    pub tail_bound: f64,
    /// (3) `[Rh]_{A_1}` and its bound `2B(1 + slack)`.
    pub a1: f64,
    pub a1_bound: f64,
    /// (4) the composite weights.
    pub composites: Vec<CompositeCheck>,
}

impl IterationReport {
    pub fn property(&self, i: usize) -> bool {
        match i {
            1 => self.dominates,
            2 => self.norm_ratio <= self.norm_bound,
            3 => self.a1 <= self.a1_bound,
            4 => self.composites.iter().all(CompositeCheck::finite),
            _ => false,
        }
    }

    pub fn all_pass(&self) -> bool {
        (1..=4).all(|i| self.property(i))
    }
}

fn composite(name: &str, w: &GridFunction, s: f64, family: &CubeFamily) -> Result<CompositeCheck> {
    let wt = Weight::new(w.map(|v| v.max(WEIGHT_FLOOR))?)?;
    Ok(CompositeCheck {
        name: name.to_string(),
        a1: wt.constant(WeightClass::A1, family)?,
        rh_exponent: s,
        rh: wt.constant(WeightClass::Rh(s), family)?,
    })
}

/// Evaluates the four properties of `R` for `h` on `family`.
pub fn check_iteration_properties(
    h: &GridFunction,
    cfg: &IterationConfig,
    r: &ExponentFunction,
    family: &CubeFamily,
    params: &CompositeParams,
) -> Result<IterationReport> {
    let (rh, tail_bound) = iterate_with_tail(h, cfg, r)?;
    let dominates = h.samples().iter().zip(rh.samples()).all(|(a, b)| a <= b);
    let nh = luxemburg_norm(h, r)?;
    let norm_ratio = if nh == 0.0 { 0.0 } else { luxemburg_norm(&rh, r)? / nh };
    let norm_bound = 2.0 * (1.0 + 2f64.powi(-(cfg.k_max as i32)));
    if h.is_zero() {
        return Ok(IterationReport {
            dominates,
            norm_ratio,
            norm_bound,
            tail_bound,
            a1: 1.0,
            a1_bound: 2.0 * cfg.b * (1.0 + A1_SLACK),
            composites: Vec::new(),
        });
    }
    let rh_weight = Weight::new(rh.map(|v| v.max(WEIGHT_FLOOR))?)?;
    let a1 = rh_weight.constant(WeightClass::A1, family)?;

    let tp = params.tau_prime;
    let h_tp = h.map(|v| v.powf(tp))?;
    let first = iterate(&h_tp, cfg)?.map(|v| v.powf(1.0 / tp))?;
    let theta = params.p / params.q;
    let second = rh.map(|v| v.powf(theta))?;
    let composites = vec![
        composite("R(h^t')^(1/t')", &first, tp, family)?,
        composite("(Rh)^(p/q)", &second, params.q / params.p, family)?,
    ];
    Ok(IterationReport {
        dominates,
        norm_ratio,
        norm_bound,
        tail_bound,
        a1,
        a1_bound: 2.0 * cfg.b * (1.0 + A1_SLACK),
        composites,
    })
}
