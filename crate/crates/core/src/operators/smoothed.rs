use std::f64::consts::PI;

use super::kernel::central_diff;
use super::KernelSpec;
use crate::error::{Error, Result};
use crate::grid::{GridSpec, MollifierSpec};
use crate::quad::CompositeRule;

/// `K^t = φ_t * K`, evaluated pointwise by quadrature.
///
/// For `|x| > 2t` the integral runs over the support `B(0, t)` of `φ_t`.
/// Closer to the origin it is written in polar coordinates about the
/// singularity: odd kernels pair `z` with `-z` so the principal value
/// becomes an absolutely convergent integral, and power kernels use the
/// substitution `u = r^α` which removes the integrable singularity.
#[derive(Clone, Debug)]
pub struct SmoothedKernel {
    kernel: KernelSpec,
    phi: MollifierSpec,
    t: f64,
    radial: CompositeRule,
    angular: CompositeRule,
}

impl SmoothedKernel {
    /// `grid` fixes the resolution floor: `t` below `2h` is refused, as for
    /// the sampled mollifier.
    pub fn new(kernel: &KernelSpec, phi: &MollifierSpec, t: f64, grid: &GridSpec) -> Result<Self> {
        if !kernel.is_convolution() {
            return Err(Error::Kernel("smoothing needs a convolution kernel".into()));
        }
        if kernel.dim() != phi.dim() {
            return Err(Error::SpecMismatch);
        }
        if t < 2.0 * grid.h() * (1.0 - 1e-12) {
            return Err(Error::UnderResolved {
                t,
                min: 2.0 * grid.h(),
            });
        }
        Ok(Self {
            kernel: kernel.clone(),
            phi: phi.clone(),
            t,
            radial: CompositeRule::new(12, 48),
            angular: CompositeRule::new(12, 16),
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    fn phi_t(&self, y: &[f64]) -> f64 {
        let n = self.phi.dim() as i32;
        let s: Vec<f64> = y.iter().map(|v| v / self.t).collect();
        self.phi.profile(&s) / self.t.powi(n)
    }

    /// `K^t(x)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let t = self.t;
        let dim = self.kernel.dim();
        if r > 2.0 * t {
            // ∫_{B(0,t)} φ_t(y) K(x - y) dy
            if dim == 1 {
                self.radial
                    .integrate(-t, t, |y| self.phi_t(&[y]) * self.kernel.eval(&[x[0] - y]))
            } else {
                self.radial.integrate(0.0, t, |rho| {
                    rho * self.angular.integrate(0.0, 2.0 * PI, |th| {
                        let y = [rho * th.cos(), rho * th.sin()];
                        self.phi_t(&y) * self.kernel.eval(&[x[0] - y[0], x[1] - y[1]])
                    })
                })
            }
        } else {
            let reach = r + t;
            match (&self.kernel, dim) {
                (KernelSpec::Power { alpha, .. }, 1) => {
                    let a = *alpha;
                    self.radial.integrate(0.0, reach.powf(a), |u| {
                        let z = u.powf(1.0 / a);
                        self.phi_t(&[x[0] - z]) + self.phi_t(&[x[0] + z])
                    }) / a
                }
                (KernelSpec::Power { alpha, .. }, _) => {
                    let a = *alpha;
                    self.radial.integrate(0.0, reach.powf(a), |u| {
                        let z = u.powf(1.0 / a);
                        self.angular.integrate(0.0, 2.0 * PI, |th| {
                            self.phi_t(&[x[0] - z * th.cos(), x[1] - z * th.sin()])
                        })
                    }) / a
                }
                (_, 1) => self.radial.integrate(0.0, reach, |z| {
                    self.kernel.eval(&[z]) * (self.phi_t(&[x[0] - z]) - self.phi_t(&[x[0] + z]))
                }),
                _ => self.radial.integrate(0.0, reach, |z| {
                    self.angular.integrate(0.0, PI, |th| {
                        let e = [th.cos(), th.sin()];
                        let kz = self.kernel.eval(&[z * e[0], z * e[1]]) * z;
                        kz * (self.phi_t(&[x[0] - z * e[0], x[1] - z * e[1]])
                            - self.phi_t(&[x[0] + z * e[0], x[1] + z * e[1]]))
                    })
                }),
            }
        }
    }

    /// Largest partial derivative of order `m` of `K^t` at `x`, by central
    /// differences with step `t/200`.
    pub fn derivative(&self, x: &[f64], m: usize) -> f64 {
        if m == 0 {
            return self.eval(x).abs();
        }
        let e = self.t / 200.0;
        if x.len() == 1 {
            return central_diff(|s| self.eval(&[x[0] + s]), m, e).abs();
        }
        let mut best = 0.0f64;
        for b0 in 0..=m {
            let b1 = m - b0;
            let v = central_diff(
                |s| central_diff(|u| self.eval(&[x[0] + s, x[1] + u]), b1, e),
                b0,
                e,
            );
            best = best.max(v.abs());
        }
        best
    }

    /// `sup_x |∂^β K^t(x)| |x|^{n-α+|β|}` over `|β| = m` and sample points
    /// log-spaced in `[t/16, 64t]`; sampling relative to `t` makes the
    /// estimate comparable across scales.
    pub fn scaled_bound(&self, m: usize) -> f64 {
        let n = self.kernel.dim() as f64;
        let alpha = self.kernel.alpha();
        let mut best = 0.0f64;
        for i in 0..=40 {
            let r = self.t * (-4.0 + 10.0 * i as f64 / 40.0).exp2();
            let pts: Vec<Vec<f64>> = if n == 1.0 {
                vec![vec![r], vec![-r]]
            } else {
                vec![vec![r, 0.0], vec![r * 0.6, r * 0.8], vec![0.0, -r]]
            };
            for x in pts {
                let d = self.derivative(&x, m);
                best = best.max(d * r.powf(n - alpha + m as f64));
            }
        }
        best
    }
}
