//! Kernel smoothing bounds and far-field estimates for single atoms.

use rand::Rng;

use super::config::{Check, Target};
use super::instances::instance_rng;
use super::level::LevelData;
use crate::atoms::{Atom, AtomicSumPlan, ScalePolicy};
use crate::error::{Error, Result};
use crate::operators::{apply_to_atom, moments_vanish, tail_ratio, KernelSpec, SmoothedKernel};

/// Default coarsest scale for the smoothing bound.
pub const DEFAULT_T: f64 = 0.25;

/// Kernel of a tail or theorem target, with the per-target default.
pub fn kernel_for(check: &Check) -> Result<KernelSpec> {
    if let Some(k) = &check.kernel {
        return Ok(k.clone());
    }
    let dim = check.dim();
    let s = match check.target() {
        Target::L7_1 | Target::T1_5 | Target::T1_6 => "nonconv-hilbert".to_string(),
        Target::T1_3 | Target::T1_4 => format!("{}:{}", if dim == 2 { "power2" } else { "power" }, check.alpha),
        _ if dim == 2 => "riesz:0".into(),
        _ => "hilbert".into(),
    };
    KernelSpec::parse(&s)
}

/// Scales `t, t/2, t/4` of instance `i`, shifted down by `i / (N+2) mod 3`
/// octaves, and the derivative order `i mod (N+2)`.
pub fn smoothing_plan(check: &Check, i: usize) -> (usize, Vec<f64>) {
    let n_orders = check.params().order.unwrap_or(0).max(0) as usize + 2;
    let m = i % n_orders;
    let shift = (i / n_orders) % 3;
    let top = check.params().t.unwrap_or(DEFAULT_T) * 0.5f64.powi(shift as i32);
    (m, vec![top, 0.5 * top, 0.25 * top])
}

/// `(max_t B(t), min_t B(t))` for the scaled derivative bound of `φ_t * K`.
pub fn smoothing_instance(check: &Check, data: &LevelData, i: usize) -> Result<(f64, f64)> {
    let kernel = kernel_for(check)?;
    let (m, ts) = smoothing_plan(check, i);
    let bounds: Vec<f64> = ts
        .iter()
        .map(|&t| Ok(SmoothedKernel::new(&kernel, &data.phi, t, &check.base)?.scaled_bound(m)))
        .collect::<Result<_>>()?;
    let hi = bounds.iter().cloned().fold(0.0, f64::max);
    let lo = bounds.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok((hi, lo))
}

/// The single random atom of tail instance `i` on this level.
pub fn tail_atom(check: &Check, data: &LevelData, i: usize, order: i32) -> Result<Atom> {
    let seed = instance_rng(check.seed(), i).random::<u64>();
    let plan = AtomicSumPlan::random(&check.base, seed, 1, order, &ScalePolicy::default())?;
    let sum = plan.realize(&data.grid)?;
    Ok(sum.terms()[0].1.clone())
}

/// `(M_φ(Ta)(x*), envelope(x*))` at the far-field point `x*` where their
/// ratio is largest. Non-convolution kernels first check the vanishing
/// moments of `Ta` up to order `L`; an atom failing them yields `None`.
pub fn tail_instance(check: &Check, data: &LevelData, i: usize) -> Result<Option<(f64, f64)>> {
    let kernel = kernel_for(check)?;
    let order = check.params().order.unwrap_or(0);
    let nonconv = check.target() == Target::L7_1;
    if nonconv && kernel.is_convolution() {
        return Err(Error::InvalidParameter("L7.1 needs a non-convolution kernel".into()));
    }
    let a = tail_atom(check, data, i, if nonconv { order + 1 } else { order })?;
    if nonconv {
        let ta = apply_to_atom(&a, &kernel)?;
        if !moments_vanish(&a, &ta, order) {
            return Ok(None);
        }
    }
    let rep = tail_ratio(&a, &kernel, &data.phi)?;
    let dim = data.grid.dim();
    let ratio = rep.ratio.samples();
    let k = (0..data.grid.len())
        .filter(|&k| !rep.excluded.contains(&data.grid.point(k)[..dim]))
        .max_by(|&a, &b| ratio[a].total_cmp(&ratio[b]))
        .ok_or_else(|| Error::InvalidParameter("no grid point outside the excluded cube".into()))?;
    Ok(Some((rep.mphi.samples()[k], rep.envelope.samples()[k])))
}
