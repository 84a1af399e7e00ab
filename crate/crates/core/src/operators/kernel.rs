use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Two-point kernel `K(x, y)` for non-convolution operators.
pub type KernelFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Kernels of the operators in scope.
#[derive(Clone)]
pub enum KernelSpec {
    /// `1/(πx)` on the line.
    Hilbert,
    /// `x_j / (2π|x|^3)` in the plane, `j ∈ {0, 1}`.
    Riesz { j: usize },
    /// `|x|^{α-n}`, the fractional integral kernel.
    Power { dim: usize, alpha: f64 },
    NonConv(NonConvKernel),
    /// The zero kernel, a degenerate test case.
    Zero { dim: usize },
}

/// A kernel `K(x, y)` that need not depend on `x - y` alone, with its
/// declared size and smoothness constants.
#[derive(Clone)]
pub struct NonConvKernel {
    pub name: String,
    pub dim: usize,
    pub k: KernelFn,
    /// `C` in `|K(x,y)| <= C / |x-y|^n`.
    pub c: f64,
    /// Hölder exponent `δ ∈ (0, 1]` of the smoothness estimates.
    pub delta: f64,
    /// Declared order `L`: the `y`-smoothness condition holds for
    /// derivatives of order `L + 1`.
    pub order: i32,
    /// The kernel is odd under `x - y ↦ y - x` near the diagonal, so the
    /// symmetric principal value exists.
    pub odd_near_diagonal: bool,
}

impl fmt::Debug for NonConvKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NonConvKernel")
            .field("name", &self.name)
            .field("dim", &self.dim)
            .field("c", &self.c)
            .field("delta", &self.delta)
            .field("order", &self.order)
            .finish()
    }
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Hilbert => write!(f, "Hilbert"),
            KernelSpec::Riesz { j } => write!(f, "Riesz{{j: {j}}}"),
            KernelSpec::Power { dim, alpha } => write!(f, "Power{{dim: {dim}, alpha: {alpha}}}"),
            KernelSpec::NonConv(k) => k.fmt(f),
            KernelSpec::Zero { dim } => write!(f, "Zero{{dim: {dim}}}"),
        }
    }
}

impl NonConvKernel {
    /// A convolution kernel seen as `K(x, y) = k(x - y)`.
    pub fn from_convolution(base: &KernelSpec) -> Result<Self> {
        let dim = base.dim();
        let b = base.clone();
        let (c, odd) = match base {
            KernelSpec::Hilbert => (1.0 / PI, true),
            KernelSpec::Riesz { .. } => (1.0 / (2.0 * PI), true),
            _ => {
                return Err(Error::Kernel(
                    "only singular convolution kernels can be lifted".into(),
                ))
            }
        };
        Ok(Self {
            name: format!("{}(x-y)", base.name()),
            dim,
            k: Arc::new(move |x: &[f64], y: &[f64]| {
                let z: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
                b.eval(&z)
            }),
            c,
            delta: 1.0,
            order: i32::MAX,
            odd_near_diagonal: odd,
        })
    }

    /// `K(x, y) = (1 + sin(x_1)/2) / (π (x - y))`: a Calderón–Zygmund
    /// kernel that is not of convolution type and in general lacks
    /// vanishing moments of `Ta`.
    pub fn modulated_hilbert() -> Self {
        Self {
            name: "hilbert*(1+sin(x)/2)".into(),
            dim: 1,
            k: Arc::new(|x: &[f64], y: &[f64]| {
                let d = x[0] - y[0];
                if d == 0.0 {
                    0.0
                } else {
                    (1.0 + 0.5 * x[0].sin()) / (PI * d)
                }
            }),
            c: 1.5 / PI,
            delta: 1.0,
            order: i32::MAX,
            odd_near_diagonal: true,
        }
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        (self.k)(x, y)
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

impl KernelSpec {
    pub fn power(dim: usize, alpha: f64) -> Result<Self> {
        if !(1..=2).contains(&dim) || !(alpha > 0.0 && alpha < dim as f64) {
            return Err(Error::InvalidParameter(format!(
                "power kernel needs 0 < α < n, got α={alpha}, n={dim}"
            )));
        }
        Ok(KernelSpec::Power { dim, alpha })
    }

    pub fn riesz(j: usize) -> Result<Self> {
        if j > 1 {
            return Err(Error::InvalidParameter(format!("Riesz index {j}")));
        }
        Ok(KernelSpec::Riesz { j })
    }

    /// Parses `hilbert`, `riesz:j`, `power:α` (1D) or `power2:α` (2D),
    /// `nonconv-hilbert`, `modulated-hilbert`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let num = |a: &str| -> Result<f64> {
            a.parse()
                .map_err(|_| Error::Parse(format!("kernel `{s}`: bad number `{a}`")))
        };
        match s.split_once(':') {
            None => match s {
                "hilbert" => Ok(KernelSpec::Hilbert),
                "zero" => Ok(KernelSpec::Zero { dim: 1 }),
                "zero2" => Ok(KernelSpec::Zero { dim: 2 }),
                "nonconv-hilbert" => Ok(KernelSpec::NonConv(NonConvKernel::from_convolution(
                    &KernelSpec::Hilbert,
                )?)),
                "modulated-hilbert" => Ok(KernelSpec::NonConv(NonConvKernel::modulated_hilbert())),
                _ => Err(Error::Parse(format!("unknown kernel `{s}`"))),
            },
            Some(("riesz", j)) => Self::riesz(num(j)? as usize),
            Some(("power", a)) => Self::power(1, num(a)?),
            Some(("power2", a)) => Self::power(2, num(a)?),
            Some(_) => Err(Error::Parse(format!("unknown kernel `{s}`"))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            KernelSpec::Hilbert => "hilbert".into(),
            KernelSpec::Riesz { j } => format!("riesz{j}"),
            KernelSpec::Power { alpha, .. } => format!("power{alpha}"),
            KernelSpec::NonConv(k) => k.name.clone(),
            KernelSpec::Zero { .. } => "zero".into(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            KernelSpec::Hilbert => 1,
            KernelSpec::Riesz { .. } => 2,
            KernelSpec::Power { dim, .. } => *dim,
            KernelSpec::NonConv(k) => k.dim,
            KernelSpec::Zero { dim } => *dim,
        }
    }

    /// `α` in the size estimate `|K(x)| <~ |x|^{α-n}`; zero for singular
    /// kernels.
    pub fn alpha(&self) -> f64 {
        match self {
            KernelSpec::Power { alpha, .. } => *alpha,
            _ => 0.0,
        }
    }

    pub fn is_convolution(&self) -> bool {
        !matches!(self, KernelSpec::NonConv(_))
    }

    /// Odd kernels, for which the symmetric principal value is used.
    pub fn is_odd(&self) -> bool {
        match self {
            KernelSpec::Hilbert | KernelSpec::Riesz { .. } | KernelSpec::Zero { .. } => true,
            KernelSpec::Power { .. } => false,
            KernelSpec::NonConv(k) => k.odd_near_diagonal,
        }
    }

    /// `K(z)` for convolution kernels (zero at the origin).
    pub fn eval(&self, z: &[f64]) -> f64 {
        match self {
            KernelSpec::Hilbert => {
                if z[0] == 0.0 {
                    0.0
                } else {
                    1.0 / (PI * z[0])
                }
            }
            KernelSpec::Riesz { j } => {
                let r2 = z[0] * z[0] + z[1] * z[1];
                if r2 == 0.0 {
                    0.0
                } else {
                    z[*j] / (2.0 * PI * r2 * r2.sqrt())
                }
            }
            KernelSpec::Power { dim, alpha } => {
                let r: f64 = z[..*dim].iter().map(|v| v * v).sum::<f64>().sqrt();
                if r == 0.0 {
                    0.0
                } else {
                    r.powf(alpha - *dim as f64)
                }
            }
            KernelSpec::NonConv(k) => {
                let zero = vec![0.0; k.dim];
                k.eval(z, &zero)
            }
            KernelSpec::Zero { .. } => 0.0,
        }
    }

    /// Declared constants `A_β` in `|∂^β K(x)| <= A_β |x|^{α-n-|β|}`, for
    /// `|β| = 0..=order`. Exact in 1D. In 2D they are the maxima over the
    /// unit circle of the largest partial derivative of each order,
    /// evaluated once here; homogeneity then fixes them at every radius.
    pub fn derivative_bounds(&self, order: usize) -> Vec<f64> {
        match self {
            KernelSpec::Hilbert => (0..=order).map(|m| factorial(m) / PI).collect(),
            KernelSpec::Zero { .. } => vec![0.0; order + 1],
            KernelSpec::Power { dim: 1, alpha } => (0..=order)
                .map(|m| (0..m).map(|k| (alpha - 1.0 - k as f64).abs()).product())
                .collect(),
            _ => (0..=order)
                .map(|m| {
                    (0..720)
                        .map(|i| {
                            let th = i as f64 * PI / 360.0;
                            max_partial(self, &[th.cos(), th.sin()], m)
                        })
                        .fold(0.0, f64::max)
                })
                .collect(),
        }
    }

    /// Spot-checks `|∂^β K(x)| |x|^{n-α+|β|} <= 2 A_β` at sample points
    /// spanning radii `2^{-6}..2^6`, for `|β| <= order`.
    pub fn verify(&self, order: usize) -> Result<()> {
        if !self.is_convolution() {
            return Ok(());
        }
        let bounds = self.derivative_bounds(order);
        let n = self.dim() as f64;
        let alpha = self.alpha();
        for e in -6..=6 {
            let r = (e as f64).exp2();
            let dirs: Vec<Vec<f64>> = if self.dim() == 1 {
                vec![vec![r], vec![-r]]
            } else {
                (0..16)
                    .map(|i| {
                        let th = 0.1 + i as f64 * PI / 8.0;
                        vec![r * th.cos(), r * th.sin()]
                    })
                    .collect()
            };
            for x in &dirs {
                for (m, &a) in bounds.iter().enumerate() {
                    let d = max_partial(self, x, m);
                    let scaled = d * r.powf(n - alpha + m as f64);
                    if scaled > 2.0 * a * (1.0 + 1e-6) {
                        return Err(Error::Kernel(format!(
                            "{}: derivative of order {m} at |x|={r} is {scaled:.4e}, \
                             above twice the declared {a:.4e}",
                            self.name()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Central-difference derivative of order `m` of `g` at 0 with step `e`.
pub(crate) fn central_diff(g: impl Fn(f64) -> f64, m: usize, e: f64) -> f64 {
    // binomial stencil on the symmetric points (k - m/2) e
    let mut s = 0.0;
    for k in 0..=m {
        let c = factorial(m) / (factorial(k) * factorial(m - k));
        let sign = if (m - k) % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * c * g((k as f64 - m as f64 / 2.0) * e);
    }
    s / e.powi(m as i32)
}

/// Largest `|∂^β K(x)|` over multi-indices with `|β| = m`.
fn max_partial(k: &KernelSpec, x: &[f64], m: usize) -> f64 {
    let r: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let e = 1e-3 * r;
    if k.dim() == 1 {
        return central_diff(|t| k.eval(&[x[0] + t]), m, e).abs();
    }
    let mut best = 0.0f64;
    for b0 in 0..=m {
        let b1 = m - b0;
        let v = central_diff(
            |s| central_diff(|t| k.eval(&[x[0] + s, x[1] + t]), b1, e),
            b0,
            e,
        );
        best = best.max(v.abs());
    }
    best
}
