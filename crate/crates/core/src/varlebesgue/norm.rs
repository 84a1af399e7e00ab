use rayon::prelude::*;

use super::exponent::ExponentFunction;
use crate::error::{Error, Result};
use crate::grid::GridFunction;

/// Constant used in the variable-exponent Hölder inequality.
pub const HOLDER_CONSTANT: f64 = 2.0;

/// Relative width at which the Luxemburg bisection stops.
pub const LUXEMBURG_RTOL: f64 = 1e-14;

fn check_grid(f: &GridFunction, p: &ExponentFunction) -> Result<()> {
    f.ensure_same_grid(p.function())
}

/// `∫ (|f(x)| / λ)^{p(x)} dx` by the midpoint rule.
pub fn modular(f: &GridFunction, lambda: f64, p: &ExponentFunction) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::InvalidParameter(format!("modular needs λ > 0, got {lambda}")));
    }
    check_grid(f, p)?;
    Ok(modular_unchecked(f, lambda, p))
}

fn modular_unchecked(f: &GridFunction, lambda: f64, p: &ExponentFunction) -> f64 {
    let inv = 1.0 / lambda;
    let s: f64 = f
        .samples()
        .par_iter()
        .zip(p.samples().par_iter())
        .map(|(&v, &e)| {
            let a = v.abs() * inv;
            if a == 0.0 {
                0.0
            } else {
                a.powf(e)
            }
        })
        .sum();
    s * f.spec().cell_volume()
}

/// Luxemburg quasi-norm `inf{λ > 0 : modular(f, λ) <= 1}`.
pub fn luxemburg_norm(f: &GridFunction, p: &ExponentFunction) -> Result<f64> {
    check_grid(f, p)?;
    let sup = f.sup_norm();
    if sup == 0.0 {
        return Ok(0.0);
    }
    let m = |l: f64| modular_unchecked(f, l, p);
    let mut lo = sup;
    let mut hi = sup;
    let mut steps = 0;
    while m(lo) <= 1.0 {
        lo *= 0.5;
        steps += 1;
        if steps > 2100 || lo == 0.0 {
            return Err(Error::Bracket(format!("no lower bracket below λ = {lo:e}")));
        }
    }
    steps = 0;
    while m(hi) > 1.0 {
        hi *= 2.0;
        steps += 1;
        if steps > 2100 || !hi.is_finite() {
            return Err(Error::Bracket(format!("no upper bracket above λ = {hi:e}")));
        }
    }
    // m(lo) > 1 >= m(hi)
    for _ in 0..400 {
        if hi - lo <= LUXEMBURG_RTOL * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if m(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Both sides of Hölder's inequality `∫|fg| <= K ‖f‖_{p(·)} ‖g‖_{p'(·)}`.
/// Returns `(lhs, rhs)`.
pub fn holder_pairing(
    f: &GridFunction,
    g: &GridFunction,
    p: &ExponentFunction,
) -> Result<(f64, f64)> {
    let lhs = f.mul(g)?.abs().integrate();
    let pc = p.conjugate()?;
    let rhs = HOLDER_CONSTANT * luxemburg_norm(f, p)? * luxemburg_norm(g, &pc)?;
    Ok((lhs, rhs))
}
