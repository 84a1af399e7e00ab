use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{covering_extreme_2d, covering_max, BoxSums, GridFunction, GridSpec};

/// Sides (in cells) searched exhaustively by the maximal operators; larger
/// cubes are restricted to dyadic multiples of the spacing.
pub const EXHAUSTIVE_SIDES: usize = 64;

/// Side lengths in cells: every side up to [`EXHAUSTIVE_SIDES`] plus every
/// power of two, capped by the smallest box dimension.
pub fn maximal_sides(spec: &GridSpec) -> Vec<usize> {
    let cap = (0..spec.dim()).map(|a| spec.shape()[a]).min().unwrap_or(1);
    let mut sides: Vec<usize> = (1..=EXHAUSTIVE_SIDES.min(cap)).collect();
    let mut s = 1usize;
    while s <= cap {
        if s > EXHAUSTIVE_SIDES {
            sides.push(s);
        }
        s *= 2;
    }
    sides
}

/// `sup_Q ℓ(Q)^α ⨍_Q |f|` over grid-aligned cubes inside the box that
/// contain each cell; `α = 0` is the Hardy–Littlewood maximal function.
fn maximal_engine(f: &GridFunction, alpha: f64) -> GridFunction {
    let spec = f.spec();
    let dim = spec.dim();
    let abs: Vec<f64> = f.samples().iter().map(|v| v.abs()).collect();
    let sums = BoxSums::from_samples(spec, &abs);
    let h = spec.h();
    let per_side: Vec<Vec<f64>> = maximal_sides(spec)
        .into_par_iter()
        .map(|s| {
            let (mut win, shape) = sums.windows(dim, s);
            let cells = (s as f64).powi(dim as i32);
            let factor = (s as f64 * h).powf(alpha);
            for v in &mut win {
                *v = *v / cells * factor;
            }
            if dim == 1 {
                covering_max(&win, s)
            } else {
                covering_extreme_2d(&win, shape, s, true).0
            }
        })
        .collect();
    let mut out = vec![0.0f64; spec.len()];
    for v in per_side {
        for (o, x) in out.iter_mut().zip(v) {
            if x > *o {
                *o = x;
            }
        }
    }
    GridFunction::from_raw(spec.clone(), out)
}

/// Uncentered Hardy–Littlewood maximal function over grid-aligned cubes.
pub fn hl_maximal(f: &GridFunction) -> GridFunction {
    maximal_engine(f, 0.0)
}

/// Fractional maximal function `M_α f = sup_Q |Q|^{α/n} ⨍_Q |f|`.
pub fn frac_maximal(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let n = f.spec().dim() as f64;
    if !(0.0..n).contains(&alpha) {
        return Err(Error::InvalidParameter(format!(
            "fractional order α={alpha} must lie in [0, {n})"
        )));
    }
    Ok(maximal_engine(f, alpha))
}
