use rayon::prelude::*;
use std::f64::consts::PI;

use super::{GridFunction, GridSpec};
use crate::error::{Error, Result};
use crate::quad::CompositeRule;

/// The standard bump `exp(-1/(1-|x|^2))` on the unit ball, normalized to
/// unit mass, together with the finite set of dyadic scales `t = 2^{-j}`
/// over which radial suprema are taken.
#[derive(Clone, Debug, PartialEq)]
pub struct MollifierSpec {
    dim: usize,
    mass: f64,
    j_min: i32,
    j_max: i32,
}

fn raw_bump(r2: f64) -> f64 {
    if r2 >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - r2)).exp()
    }
}

/// Mass of the unnormalized bump in dimension `dim`.
fn bump_mass(dim: usize) -> f64 {
    let rule = CompositeRule::new(20, 16);
    match dim {
        1 => 2.0 * rule.integrate(0.0, 1.0, |r| raw_bump(r * r)),
        _ => 2.0 * PI * rule.integrate(0.0, 1.0, |r| r * raw_bump(r * r)),
    }
}

impl MollifierSpec {
    pub fn new(dim: usize, j_min: i32, j_max: i32) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidParameter(format!("mollifier dimension {dim}")));
        }
        if j_min > j_max {
            return Err(Error::InvalidParameter(format!(
                "empty scale range j in [{j_min}, {j_max}]"
            )));
        }
        Ok(Self {
            dim,
            mass: bump_mass(dim),
            j_min,
            j_max,
        })
    }

    /// Default scales for a grid: `j` from -1 up to the finest scale that
    /// still spans two cells, `t >= 2h`.
    pub fn for_grid(spec: &GridSpec) -> Self {
        let j_max = (1.0 / (2.0 * spec.h())).log2().floor() as i32;
        Self::new(spec.dim(), -1, j_max.max(-1)).expect("valid range")
    }

    /// Same profile with the scale range widened (or shrunk) at either end.
    pub fn with_range(&self, j_min: i32, j_max: i32) -> Result<Self> {
        Self::new(self.dim, j_min, j_max)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn j_range(&self) -> (i32, i32) {
        (self.j_min, self.j_max)
    }

    /// Scales `2^{-j}`, coarsest first.
    pub fn scales(&self) -> Vec<f64> {
        (self.j_min..=self.j_max).map(|j| (-j as f64).exp2()).collect()
    }

    /// Normalized profile `φ(x)`.
    pub fn profile(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().take(self.dim).map(|v| v * v).sum();
        raw_bump(r2) / self.mass
    }

    /// `max φ = φ(0)`.
    pub fn peak(&self) -> f64 {
        (-1.0f64).exp() / self.mass
    }

    /// Constant in the pointwise bound `M_φ f <= C_φ M f` for the cube
    /// maximal function: `φ_t` is supported in a cube of side `2t`, so
    /// `C_φ = max φ · 2^n`. In 1D this is `max φ · |B(0,1)|`.
    pub fn domination_constant(&self) -> f64 {
        self.peak() * (1u32 << self.dim) as f64
    }

    /// Sampled `φ_t` as a stencil of offsets (in cells) with weights summing
    /// to exactly one.
    pub fn stencil(&self, spec: &GridSpec, t: f64) -> Result<Stencil> {
        if spec.dim() != self.dim {
            return Err(Error::SpecMismatch);
        }
        let h = spec.h();
        if t < 2.0 * h * (1.0 - 1e-12) {
            return Err(Error::UnderResolved { t, min: 2.0 * h });
        }
        let reach = (t / h).ceil() as i64;
        let mut offsets = Vec::new();
        let mut weights = Vec::new();
        let range1 = if self.dim == 2 { -reach..=reach } else { 0..=0 };
        for d0 in -reach..=reach {
            for d1 in range1.clone() {
                let x = [d0 as f64 * h / t, d1 as f64 * h / t];
                let v = self.profile(&x);
                if v > 0.0 {
                    offsets.push([d0, d1]);
                    weights.push(v);
                }
            }
        }
        let total: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= total;
        }
        Ok(Stencil { offsets, weights })
    }
}

/// Discrete convolution kernel: `out[x] = Σ weights[k] f[x - offsets[k]]`.
#[derive(Clone, Debug)]
pub struct Stencil {
    pub offsets: Vec<[i64; 2]>,
    pub weights: Vec<f64>,
}

impl Stencil {
    /// Applies the stencil with zero extension outside the box.
    pub fn apply(&self, f: &GridFunction) -> GridFunction {
        let spec = f.spec();
        let [n0, n1] = spec.shape();
        let src = f.samples();
        // gather over the nonzero rows only pays off when the input is
        // sparse; the dense path walks the stencil row by row
        let out: Vec<f64> = (0..spec.len())
            .into_par_iter()
            .map(|k| {
                let [i, j] = spec.unflat(k);
                let mut acc = 0.0;
                for (d, w) in self.offsets.iter().zip(&self.weights) {
                    let a = i as i64 - d[0];
                    let b = j as i64 - d[1];
                    if a >= 0 && b >= 0 && (a as usize) < n0 && (b as usize) < n1 {
                        acc += w * src[a as usize * n1 + b as usize];
                    }
                }
                acc
            })
            .collect();
        GridFunction::from_raw(spec.clone(), out)
    }
}

/// `φ_t * f`, with `φ_t` sampled on the grid and renormalized to unit
/// discrete mass. Refuses `t < 2h`.
pub fn mollify(f: &GridFunction, phi: &MollifierSpec, t: f64) -> Result<GridFunction> {
    Ok(phi.stencil(f.spec(), t)?.apply(f))
}
