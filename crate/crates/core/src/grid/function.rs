use super::spec::GridSpec;
use crate::error::{Error, Result};

/// Real samples on a [`GridSpec`]. Samples are always finite.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    spec: GridSpec,
    samples: Vec<f64>,
}

fn check_finite(samples: &[f64]) -> Result<()> {
    match samples.iter().position(|v| !v.is_finite()) {
        Some(k) => Err(Error::NonFinite(k)),
        None => Ok(()),
    }
}

impl GridFunction {
    pub fn new(spec: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != spec.len() {
            return Err(Error::InvalidGrid(format!(
                "{} samples for a grid of {}",
                samples.len(),
                spec.len()
            )));
        }
        check_finite(&samples)?;
        Ok(Self { spec, samples })
    }

    /// Internal constructor for outputs of operators that cannot produce
    /// non-finite values from finite inputs.
    pub(crate) fn from_raw(spec: GridSpec, samples: Vec<f64>) -> Self {
        debug_assert_eq!(samples.len(), spec.len());
        debug_assert!(samples.iter().all(|v| v.is_finite()));
        Self { spec, samples }
    }

    pub fn zeros(spec: &GridSpec) -> Self {
        Self::constant(spec, 0.0)
    }

    pub fn constant(spec: &GridSpec, c: f64) -> Self {
        assert!(c.is_finite());
        Self {
            spec: spec.clone(),
            samples: vec![c; spec.len()],
        }
    }

    /// Samples `f` at every cell center. In 1D the second coordinate is 0.
    pub fn from_fn(spec: &GridSpec, f: impl Fn([f64; 2]) -> f64) -> Result<Self> {
        let samples: Vec<f64> = (0..spec.len()).map(|k| f(spec.point(k))).collect();
        Self::new(spec.clone(), samples)
    }

    /// Indicator of the cells whose centers lie in the cube.
    pub fn indicator(spec: &GridSpec, cube: &super::Cube) -> Self {
        let mut out = Self::zeros(spec);
        if let Ok(range) = cube.cells(spec) {
            range.for_each(spec, |k| out.samples[k] = 1.0);
        }
        out
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    /// Midpoint quadrature `h^n Σ samples`.
    pub fn integrate(&self) -> f64 {
        self.spec.cell_volume() * self.samples.iter().sum::<f64>()
    }

    pub fn ensure_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.spec.clone(), self.samples.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.ensure_same_grid(other)?;
        let samples = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.spec.clone(), samples)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Self {
        assert!(c.is_finite());
        Self::from_raw(
            self.spec.clone(),
            self.samples.iter().map(|v| v * c).collect(),
        )
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: f64, other: &GridFunction) -> Result<()> {
        self.ensure_same_grid(other)?;
        for (a, b) in self.samples.iter_mut().zip(&other.samples) {
            *a += c * b;
        }
        check_finite(&self.samples)
    }

    pub fn abs(&self) -> Self {
        Self::from_raw(
            self.spec.clone(),
            self.samples.iter().map(|v| v.abs()).collect(),
        )
    }

    /// Pointwise `|f|^e`.
    pub fn abs_pow(&self, e: f64) -> Result<Self> {
        self.map(|v| v.abs().powf(e))
    }

    pub fn max(&self) -> f64 {
        self.samples.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.samples.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|&v| v == 0.0)
    }

    /// Value of the cell containing `x` (0 outside the box).
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.spec.cell_of(x).map_or(0.0, |k| self.samples[k])
    }

    /// Multilinear interpolation between cell centers; clamped to the
    /// outermost centers inside the box and 0 outside it.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let spec = &self.spec;
        if spec.cell_of(x).is_none() {
            return 0.0;
        }
        let mut base = [0usize; 2];
        let mut frac = [0.0f64; 2];
        for axis in 0..spec.dim() {
            let n = spec.shape()[axis];
            let u = ((x[axis] - spec.lo(axis)) / spec.h() - 0.5).clamp(0.0, (n - 1) as f64);
            let i = (u.floor() as usize).min(n.saturating_sub(2));
            base[axis] = i;
            frac[axis] = if n > 1 { u - i as f64 } else { 0.0 };
        }
        if spec.dim() == 1 {
            let i = base[0];
            let a = self.samples[i];
            let b = if spec.shape()[0] > 1 { self.samples[i + 1] } else { a };
            a + frac[0] * (b - a)
        } else {
            let [i, j] = base;
            let s = |a: usize, b: usize| self.samples[spec.flat(a, b)];
            let (i1, j1) = (
                (i + 1).min(spec.shape()[0] - 1),
                (j + 1).min(spec.shape()[1] - 1),
            );
            let v0 = s(i, j) + frac[1] * (s(i, j1) - s(i, j));
            let v1 = s(i1, j) + frac[1] * (s(i1, j1) - s(i1, j));
            v0 + frac[0] * (v1 - v0)
        }
    }
}

/// Pointwise `(Σ_k |g_k|^r)^{1/r}`; the norm of a vector-valued expression
/// is always taken after this pointwise reduction.
pub fn lr_combine(fs: &[GridFunction], r: f64) -> Result<GridFunction> {
    let first = fs
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty family".into()))?;
    for f in fs {
        first.ensure_same_grid(f)?;
    }
    let n = first.spec().len();
    let mut acc = vec![0.0; n];
    for f in fs {
        for (a, v) in acc.iter_mut().zip(f.samples()) {
            *a += v.abs().powf(r);
        }
    }
    for a in &mut acc {
        *a = a.powf(1.0 / r);
    }
    GridFunction::new(first.spec().clone(), acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_line() -> GridSpec {
        GridSpec::line(0.0, 1.0, 1.0 / 256.0).unwrap()
    }

    #[test]
    fn integrate_constant_is_exact() {
        let f = GridFunction::constant(&unit_line(), 1.0);
        assert_eq!(f.integrate(), 1.0);
    }

    #[test]
    fn integrate_half_indicator() {
        let g = unit_line();
        let f = GridFunction::from_fn(&g, |x| if x[0] <= 0.5 { 1.0 } else { 0.0 }).unwrap();
        assert!((f.integrate() - 0.5).abs() <= g.h());
    }

    #[test]
    fn integrate_identity() {
        let f = GridFunction::from_fn(&unit_line(), |x| x[0]).unwrap();
        assert!((f.integrate() - 0.5).abs() < 1e-5);
    }

    #[test]
    fn rejects_non_finite_and_mismatch() {
        let g = unit_line();
        assert!(GridFunction::from_fn(&g, |_| f64::NAN).is_err());
        let other = GridFunction::zeros(&GridSpec::line(0.0, 2.0, 1.0 / 256.0).unwrap());
        let f = GridFunction::zeros(&g);
        assert!(matches!(f.add(&other), Err(Error::SpecMismatch)));
    }

    #[test]
    fn eval_interpolates_linear_functions() {
        let f = GridFunction::from_fn(&unit_line(), |x| 3.0 * x[0] - 1.0).unwrap();
        assert!((f.eval(&[0.5]) - 0.5).abs() < 1e-12);
        let g2 = GridSpec::square(0.0, 1.0, 1.0 / 16.0).unwrap();
        let f2 = GridFunction::from_fn(&g2, |x| x[0] + 2.0 * x[1]).unwrap();
        assert!((f2.eval(&[0.3, 0.6]) - 1.5).abs() < 1e-12);
    }
}
