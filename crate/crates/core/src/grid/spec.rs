use crate::error::{Error, Result};

/// Upper bound on the number of samples a grid may hold unless a caller
/// raises it explicitly.
pub const DEFAULT_SAMPLE_BUDGET: usize = 1 << 24;

/// Uniform cell-centered grid over an axis-aligned box in dimension 1 or 2.
///
/// Samples live at cell centers `lo + (i + 1/2) h`, so the midpoint rule
/// is `h^n` times the sample sum. Flat indices are row-major with axis 0
/// slowest; in 1D the second axis has length one.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    dim: usize,
    lo: [f64; 2],
    hi: [f64; 2],
    h: f64,
    shape: [usize; 2],
}

impl GridSpec {
    pub fn new(lo: &[f64], hi: &[f64], h: f64) -> Result<Self> {
        Self::with_budget(lo, hi, h, DEFAULT_SAMPLE_BUDGET)
    }

    pub fn with_budget(lo: &[f64], hi: &[f64], h: f64, budget: usize) -> Result<Self> {
        let dim = lo.len();
        if !(1..=2).contains(&dim) || hi.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "dimension must be 1 or 2 (got lo={}, hi={})",
                lo.len(),
                hi.len()
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidGrid(format!("spacing h={h} must be positive")));
        }
        let mut shape = [1usize; 2];
        let mut l = [0.0; 2];
        let mut u = [0.0; 2];
        for axis in 0..dim {
            let side = hi[axis] - lo[axis];
            if !(side > 0.0 && side.is_finite()) {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: empty or non-finite interval [{}, {}]",
                    lo[axis], hi[axis]
                )));
            }
            let cells = side / h;
            let rounded = cells.round();
            if (cells - rounded).abs() > 1e-9 * rounded.max(1.0) {
                return Err(Error::InvalidGrid(format!(
                    "axis {axis}: spacing {h} does not divide side {side}"
                )));
            }
            shape[axis] = rounded as usize;
            l[axis] = lo[axis];
            u[axis] = hi[axis];
        }
        let total = shape[0].saturating_mul(shape[1]);
        if total > budget {
            return Err(Error::InvalidGrid(format!(
                "{total} samples exceed the budget of {budget}"
            )));
        }
        Ok(Self {
            dim,
            lo: l,
            hi: u,
            h,
            shape,
        })
    }

    /// 1D grid on `[lo, hi]`.
    pub fn line(lo: f64, hi: f64, h: f64) -> Result<Self> {
        Self::new(&[lo], &[hi], h)
    }

    /// 2D grid on `[lo, hi]^2`.
    pub fn square(lo: f64, hi: f64, h: f64) -> Result<Self> {
        Self::new(&[lo, lo], &[hi, hi], h)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn lo(&self, axis: usize) -> f64 {
        self.lo[axis]
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.hi[axis]
    }

    pub fn lo_vec(&self) -> Vec<f64> {
        self.lo[..self.dim].to_vec()
    }

    pub fn hi_vec(&self) -> Vec<f64> {
        self.hi[..self.dim].to_vec()
    }

    /// Cells per axis; the second entry is 1 in 1D.
    pub fn shape(&self) -> [usize; 2] {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.shape[0] * self.shape[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `h^n`, the quadrature weight of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.h.powi(self.dim as i32)
    }

    /// Lebesgue measure of the box.
    pub fn box_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.hi[a] - self.lo[a]).product()
    }

    #[inline]
    pub fn flat(&self, i0: usize, i1: usize) -> usize {
        i0 * self.shape[1] + i1
    }

    #[inline]
    pub fn unflat(&self, k: usize) -> [usize; 2] {
        [k / self.shape[1], k % self.shape[1]]
    }

    /// Coordinate of the cell center along `axis`.
    #[inline]
    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        self.lo[axis] + (i as f64 + 0.5) * self.h
    }

    /// Cell center of a flat index (unused axes are 0).
    #[inline]
    pub fn point(&self, k: usize) -> [f64; 2] {
        let [i0, i1] = self.unflat(k);
        let x0 = self.coord(0, i0);
        let x1 = if self.dim == 2 { self.coord(1, i1) } else { 0.0 };
        [x0, x1]
    }

    /// Index of the cell containing `x`, if `x` lies in the box.
    pub fn cell_of(&self, x: &[f64]) -> Option<usize> {
        let mut idx = [0usize; 2];
        for axis in 0..self.dim {
            let u = (x[axis] - self.lo[axis]) / self.h;
            if u < 0.0 || u >= self.shape[axis] as f64 {
                return None;
            }
            idx[axis] = u.floor() as usize;
        }
        Some(self.flat(idx[0], idx[1]))
    }

    /// Same box at half the spacing.
    pub fn refine(&self) -> Self {
        let mut s = self.clone();
        s.h = self.h / 2.0;
        for axis in 0..self.dim {
            s.shape[axis] *= 2;
        }
        s
    }

    /// Same box with spacing `h / 2^levels`.
    pub fn refined(&self, levels: u32) -> Self {
        (0..levels).fold(self.clone(), |s, _| s.refine())
    }

    /// Whether `x` lies in the inner half of the box (the box shrunk by a
    /// factor two about its center).
    pub fn in_inner_half(&self, x: &[f64]) -> bool {
        (0..self.dim).all(|a| {
            let c = 0.5 * (self.lo[a] + self.hi[a]);
            let r = 0.25 * (self.hi[a] - self.lo[a]);
            (x[a] - c).abs() <= r
        })
    }
}
