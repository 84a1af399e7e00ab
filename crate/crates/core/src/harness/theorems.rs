//! `‖M_φ(Tf)‖_target / ‖Σ λ_i χ_{Q_i}‖_source` over random atomic sums.

use rand::Rng;

use super::config::{Check, Target};
use super::instances::instance_rng;
use super::level::LevelData;
use super::tails::kernel_for;
use crate::atoms::{hardy_quasinorm, moment_order_required, AtomicSum, AtomicSumPlan, MomentRule, ScalePolicy};
use crate::error::Result;
use crate::grid::GridFunction;
use crate::operators::{apply_to_atom, moments_vanish, KernelSpec};

/// Atoms per sum unless configured.
pub const DEFAULT_ATOMS: usize = 3;

/// `(atom order, operator moment order L)`; `L` is `None` for convolution
/// operators.
pub fn theorem_orders(check: &Check) -> Result<(i32, Option<i32>)> {
    let n = check.dim();
    let t = check.target();
    let ratio = if t.is_variable() {
        1.0 / check.exponent_on(&check.base)?.p_minus()
    } else {
        check.rw()? / check.p
    };
    let atomic = moment_order_required(&MomentRule::Atomic { n, ratio })?;
    let cfg = check.params().order;
    Ok(match t {
        Target::T1_1 | Target::T1_2 => {
            let rule = MomentRule::Singular { n, ratio };
            (cfg.unwrap_or(moment_order_required(&rule)?.max(atomic)), None)
        }
        Target::T1_3 => {
            let rule = MomentRule::FractionalWeighted {
                n,
                alpha: check.alpha,
                p: check.p,
                q: check.q,
                r_wp: closed_rw(check, check.p)?,
                r_wq: closed_rw(check, check.q)?,
            };
            (cfg.unwrap_or(moment_order_required(&rule)?), None)
        }
        Target::T1_4 => {
            let rule = MomentRule::FractionalVariable { n, p_minus: 1.0 / ratio };
            (cfg.unwrap_or(moment_order_required(&rule)?), None)
        }
        _ => {
            let l = cfg.unwrap_or(moment_order_required(&MomentRule::NonConvolution { n, ratio })?);
            ((l + 1).max(atomic), Some(l))
        }
    })
}

fn closed_rw(check: &Check, e: f64) -> Result<f64> {
    check.weight.pow(e).known_rw(check.dim()).ok_or_else(|| {
        crate::Error::InvalidParameter(format!("{}: no closed-form r_w for w^{e}", check.target()))
    })
}

/// The atomic sum of instance `i`, realized on this level.
pub fn theorem_sum(check: &Check, data: &LevelData, i: usize, order: i32) -> Result<AtomicSum> {
    let seed = instance_rng(check.seed(), i).random::<u64>();
    let count = check.params().atoms.unwrap_or(DEFAULT_ATOMS);
    AtomicSumPlan::random(&check.base, seed, count, order, &ScalePolicy::default())?.realize(&data.grid)
}

/// `Tf = Σ λ_i T a_i`, or `None` when some `T a_i` fails the vanishing
/// moments up to `L`.
pub fn apply_to_sum(sum: &AtomicSum, kernel: &KernelSpec, moments: Option<i32>) -> Result<Option<GridFunction>> {
    let mut tf = GridFunction::zeros(sum.spec());
    for (l, a) in sum.terms() {
        let ta = apply_to_atom(a, kernel)?;
        if let Some(order) = moments {
            if !moments_vanish(a, &ta, order) {
                return Ok(None);
            }
        }
        tf.axpy(*l, &ta)?;
    }
    Ok(Some(tf))
}

/// `(‖M_φ(Tf)‖_target, ‖Σ λ_i χ_{Q_i}‖_source)` for a given sum.
pub fn theorem_ratio(check: &Check, data: &LevelData, sum: &AtomicSum) -> Result<Option<(f64, f64)>> {
    let (_, moments) = theorem_orders(check)?;
    let kernel = kernel_for(check)?;
    let Some(tf) = apply_to_sum(sum, &kernel, moments)? else {
        return Ok(None);
    };
    let lhs = hardy_quasinorm(&tf, &data.phi, &data.target)?;
    let rhs = sum.coefficient_norm(&data.source)?;
    Ok(Some((lhs, rhs)))
}

pub fn theorem_instance(check: &Check, data: &LevelData, i: usize) -> Result<Option<(f64, f64)>> {
    let (order, _) = theorem_orders(check)?;
    let sum = theorem_sum(check, data, i, order)?;
    theorem_ratio(check, data, &sum)
}
