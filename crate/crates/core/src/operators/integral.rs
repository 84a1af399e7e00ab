use rayon::prelude::*;
use std::f64::consts::PI;

use super::{KernelSpec, NonConvKernel};
use crate::error::{Error, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::quad::CompositeRule;

/// Translation-invariant quadrature weights `c[d]` for offsets `d` in cells,
/// so that `Tf(x_i) = Σ_j c[i - j] f_j`.
struct ConvTable {
    half: [usize; 2],
    values: Vec<f64>,
}

impl ConvTable {
    /// Builds the table from a function of the absolute offsets for even
    /// kernels or the signed offsets in general.
    fn build(spec: &GridSpec, weight: impl Fn(i64, i64) -> f64 + Sync) -> Self {
        let [n0, n1] = spec.shape();
        let half = [n0 - 1, n1 - 1];
        let w1 = 2 * half[1] + 1;
        let values: Vec<f64> = (0..(2 * half[0] + 1) * w1)
            .into_par_iter()
            .map(|k| {
                let d0 = (k / w1) as i64 - half[0] as i64;
                let d1 = (k % w1) as i64 - half[1] as i64;
                weight(d0, d1)
            })
            .collect();
        Self {
            half,
            values,
        }
    }

    #[inline]
    fn at(&self, d0: i64, d1: i64) -> f64 {
        let w1 = 2 * self.half[1] + 1;
        let i = (d0 + self.half[0] as i64) as usize;
        let j = (d1 + self.half[1] as i64) as usize;
        self.values[i * w1 + j]
    }

    /// Scatters each nonzero input sample against the table.
    fn apply(&self, f: &GridFunction) -> GridFunction {
        let spec = f.spec();
        let n1 = spec.shape()[1];
        let nz: Vec<(usize, usize, f64)> = f
            .samples()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(k, v)| {
                let [a, b] = spec.unflat(k);
                (a, b, *v)
            })
            .collect();
        let out: Vec<f64> = (0..spec.len())
            .into_par_iter()
            .map(|k| {
                let i = (k / n1) as i64;
                let j = (k % n1) as i64;
                nz.iter()
                    .map(|&(a, b, v)| v * self.at(i - a as i64, j - b as i64))
                    .sum()
            })
            .collect();
        GridFunction::from_raw(spec.clone(), out)
    }
}

/// `∫_{(d-1/2)h}^{(d+1/2)h} |u|^{α-1} du`, exact.
fn power_cell_1d(d: i64, h: f64, alpha: f64) -> f64 {
    let d = d.unsigned_abs() as f64;
    let scale = h.powf(alpha) / alpha;
    if d == 0.0 {
        2.0 * 0.5f64.powf(alpha) * scale
    } else {
        ((d + 0.5).powf(alpha) - (d - 0.5).powf(alpha)) * scale
    }
}

/// `∫` of `|z|^{α-2}` over the square cell centered at the origin, from
/// the polar form `(8/α) ∫_0^{π/4} (h / (2 cos θ))^α dθ`.
fn power_cell_2d_origin(h: f64, alpha: f64) -> f64 {
    let rule = CompositeRule::new(16, 8);
    8.0 / alpha * rule.integrate(0.0, PI / 4.0, |th| (h / (2.0 * th.cos())).powf(alpha))
}

/// Cell integral of `|z|^{α-2}` over the cell at offset `(d0, d1)` using a
/// 3x3 midpoint sub-grid.
fn power_cell_2d_refined(d0: i64, d1: i64, h: f64, alpha: f64) -> f64 {
    let mut s = 0.0;
    for a in -1..=1 {
        for b in -1..=1 {
            let x = (d0 as f64 + a as f64 / 3.0) * h;
            let y = (d1 as f64 + b as f64 / 3.0) * h;
            s += (x * x + y * y).sqrt().powf(alpha - 2.0);
        }
    }
    s * h * h / 9.0
}

/// Fractional integral `I_α f(x) = ∫ f(y) |x-y|^{α-n} dy`.
///
/// In 1D every cell weight is the exact cell integral of the kernel. In 2D
/// the singular cell uses the exact polar formula, its eight neighbours a
/// 3x3 sub-grid, and all others the midpoint rule.
pub fn riesz_potential(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let spec = f.spec();
    let n = spec.dim() as f64;
    if !(alpha > 0.0 && alpha < n) {
        return Err(Error::InvalidParameter(format!(
            "Riesz potential needs 0 < α < n, got α={alpha}"
        )));
    }
    let h = spec.h();
    let table = if spec.dim() == 1 {
        ConvTable::build(spec, |d0, _| power_cell_1d(d0, h, alpha))
    } else {
        let origin = power_cell_2d_origin(h, alpha);
        ConvTable::build(spec, move |d0, d1| {
            if d0 == 0 && d1 == 0 {
                origin
            } else if d0.abs() <= 1 && d1.abs() <= 1 {
                power_cell_2d_refined(d0, d1, h, alpha)
            } else {
                let r = ((d0 * d0 + d1 * d1) as f64).sqrt() * h;
                r.powf(alpha - 2.0) * h * h
            }
        })
    };
    Ok(table.apply(f))
}

/// Principal-value cutoff: the ball `|x - y| < PV_CELLS h` is excised.
pub const PV_CELLS: f64 = 2.0;

/// `p.v. ∫ K(x-y) f(y) dy` for odd convolution kernels, realized as the
/// midpoint rule with the ball `|x-y| < 2h` excised.
pub fn singular_integral(f: &GridFunction, kernel: &KernelSpec) -> Result<GridFunction> {
    let spec = f.spec();
    if kernel.dim() != spec.dim() {
        return Err(Error::InvalidParameter(format!(
            "kernel {} is {}-dimensional, grid is {}-dimensional",
            kernel.name(),
            kernel.dim(),
            spec.dim()
        )));
    }
    if !matches!(
        kernel,
        KernelSpec::Hilbert | KernelSpec::Riesz { .. } | KernelSpec::Zero { .. }
    ) {
        return Err(Error::Kernel(format!(
            "{} is not an odd singular convolution kernel",
            kernel.name()
        )));
    }
    let h = spec.h();
    let vol = spec.cell_volume();
    let table = ConvTable::build(spec, |d0, d1| {
        let r2 = (d0 * d0 + d1 * d1) as f64;
        if r2 < PV_CELLS * PV_CELLS {
            0.0
        } else {
            kernel.eval(&[d0 as f64 * h, d1 as f64 * h]) * vol
        }
    });
    Ok(table.apply(f))
}

/// `∫ K(x, y) f(y) dy` for a two-point kernel, with the same symmetric
/// excision as [`singular_integral`].
pub fn nonconv_integral(f: &GridFunction, kernel: &NonConvKernel) -> Result<GridFunction> {
    let spec = f.spec();
    if kernel.dim != spec.dim() {
        return Err(Error::SpecMismatch);
    }
    if !kernel.odd_near_diagonal {
        return Err(Error::Kernel(format!(
            "{}: no principal-value policy for a kernel that is not odd near the diagonal",
            kernel.name
        )));
    }
    let h = spec.h();
    let vol = spec.cell_volume();
    let dim = spec.dim();
    let nz: Vec<(usize, f64)> = f
        .samples()
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(k, v)| (k, *v))
        .collect();
    let cut2 = (PV_CELLS * h) * (PV_CELLS * h) * (1.0 - 1e-9);
    let out: Vec<f64> = (0..spec.len())
        .into_par_iter()
        .map(|k| {
            let x = spec.point(k);
            let mut s = 0.0;
            for &(j, v) in &nz {
                let y = spec.point(j);
                let r2: f64 = (0..dim).map(|a| (x[a] - y[a]).powi(2)).sum();
                if r2 >= cut2 {
                    s += kernel.eval(&x[..dim], &y[..dim]) * v;
                }
            }
            s * vol
        })
        .collect();
    GridFunction::new(spec.clone(), out)
}

/// Applies the operator with kernel `kernel` to `f`.
pub fn apply_kernel(f: &GridFunction, kernel: &KernelSpec) -> Result<GridFunction> {
    match kernel {
        KernelSpec::Power { dim, alpha } => {
            if *dim != f.spec().dim() {
                return Err(Error::SpecMismatch);
            }
            riesz_potential(f, *alpha)
        }
        KernelSpec::NonConv(k) => nonconv_integral(f, k),
        _ => singular_integral(f, kernel),
    }
}
