use super::{GridFunction, GridSpec};
use crate::error::{Error, Result};

/// Axis-parallel cube, stored by center and side length so that dilation
/// keeps the center fixed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cube {
    dim: usize,
    center: [f64; 2],
    side: f64,
}

/// Half-open block of cell indices `[start, end)` per axis covered by a
/// cube, after clipping to the box.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CellRange {
    pub start: [usize; 2],
    pub end: [usize; 2],
    /// The cube reached outside the box and was cut back to it.
    pub clipped: bool,
}

impl CellRange {
    pub fn count(&self) -> usize {
        (self.end[0] - self.start[0]) * (self.end[1] - self.start[1])
    }

    /// Side length in cells along axis 0.
    pub fn width(&self) -> usize {
        self.end[0] - self.start[0]
    }

    pub fn for_each(&self, spec: &GridSpec, mut f: impl FnMut(usize)) {
        for i in self.start[0]..self.end[0] {
            for j in self.start[1]..self.end[1] {
                f(spec.flat(i, j));
            }
        }
    }

    pub fn contains(&self, idx: [usize; 2]) -> bool {
        (0..2).all(|a| idx[a] >= self.start[a] && idx[a] < self.end[a])
    }
}

impl Cube {
    /// Cube with lower corner `corner` and side `side`.
    pub fn new(corner: &[f64], side: f64) -> Result<Self> {
        let dim = corner.len();
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidParameter(format!("cube dimension {dim}")));
        }
        if !(side > 0.0 && side.is_finite()) {
            return Err(Error::InvalidParameter(format!("cube side {side}")));
        }
        let mut center = [0.0; 2];
        for (c, &x) in center.iter_mut().zip(corner) {
            *c = x + 0.5 * side;
        }
        Ok(Self { dim, center, side })
    }

    pub fn from_center(center: &[f64], side: f64) -> Result<Self> {
        let corner: Vec<f64> = center.iter().map(|c| c - 0.5 * side).collect();
        let mut q = Self::new(&corner, side)?;
        q.center[..center.len()].copy_from_slice(center);
        Ok(q)
    }

    /// 1D interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(&[a], b - a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn center(&self) -> &[f64] {
        &self.center[..self.dim]
    }

    pub fn corner(&self) -> Vec<f64> {
        self.center().iter().map(|c| c - 0.5 * self.side).collect()
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// `τQ`: same center, side `τ ℓ(Q)`.
    pub fn dilate(&self, tau: f64) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidParameter(format!("dilation factor {tau}")));
        }
        Ok(Self {
            dim: self.dim,
            center: self.center,
            side: self.side * tau,
        })
    }

    /// `Q* = 2√n Q`.
    pub fn star(&self) -> Self {
        self.dilate(2.0 * (self.dim as f64).sqrt())
            .expect("positive factor")
    }

    /// `Q** = (Q*)*`.
    pub fn double_star(&self) -> Self {
        self.star().star()
    }

    /// Dilates and reports whether the result leaves the box.
    pub fn dilate_in(&self, tau: f64, spec: &GridSpec) -> Result<(Self, bool)> {
        let q = self.dilate(tau)?;
        let inside = q.inside(spec);
        Ok((q, !inside))
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (0..self.dim).all(|a| (x[a] - self.center[a]).abs() <= 0.5 * self.side)
    }

    /// Distance from `x` to the center in the Euclidean norm.
    pub fn dist_to_center(&self, x: &[f64]) -> f64 {
        (0..self.dim)
            .map(|a| (x[a] - self.center[a]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn inside(&self, spec: &GridSpec) -> bool {
        let tol = 1e-9 * spec.h();
        (0..self.dim).all(|a| {
            self.center[a] - 0.5 * self.side >= spec.lo(a) - tol
                && self.center[a] + 0.5 * self.side <= spec.hi(a) + tol
        })
    }

    /// Cells whose centers lie in the half-open cube, clipped to the box.
    pub fn cells(&self, spec: &GridSpec) -> Result<CellRange> {
        if spec.dim() != self.dim {
            return Err(Error::SpecMismatch);
        }
        let mut start = [0usize; 2];
        let mut end = [1usize; 2];
        let mut clipped = false;
        for a in 0..self.dim {
            let lo = self.center[a] - 0.5 * self.side;
            let hi = self.center[a] + 0.5 * self.side;
            let n = spec.shape()[a] as f64;
            let s = ((lo - spec.lo(a)) / spec.h() - 0.5).ceil();
            let e = ((hi - spec.lo(a)) / spec.h() - 0.5).ceil();
            if s < 0.0 || e > n {
                clipped = true;
            }
            let s = s.clamp(0.0, n);
            let e = e.clamp(0.0, n);
            if e <= s {
                return Err(Error::EmptyCube);
            }
            start[a] = s as usize;
            end[a] = e as usize;
        }
        Ok(CellRange {
            start,
            end,
            clipped,
        })
    }
}

/// `|Q|^{-1} ∫_Q f`, treating `f` as zero outside the box.
pub fn cube_average(f: &GridFunction, q: &Cube) -> Result<f64> {
    let spec = f.spec();
    let range = q.cells(spec)?;
    let mut sum = 0.0;
    range.for_each(spec, |k| sum += f.samples()[k]);
    Ok(sum * spec.cell_volume() / q.volume())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn dilation_examples() {
        let q = Cube::interval(0.0, 1.0).unwrap();
        let t = q.dilate(3.0).unwrap();
        assert_eq!(t.corner(), vec![-1.0]);
        assert_eq!(t.side(), 3.0);
        let s = q.star();
        assert_eq!(s.corner(), vec![-0.5]);
        assert_eq!(s.side(), 2.0);
        let q2 = Cube::new(&[0.0, 0.0], 1.0).unwrap();
        let s2 = q2.star();
        assert!((s2.side() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s2.center(), &[0.5, 0.5]);
    }

    #[test]
    fn clipping_is_flagged() {
        let g = GridSpec::line(-1.0, 1.0, 0.125).unwrap();
        let q = Cube::interval(0.0, 1.0).unwrap();
        let (d, out) = q.dilate_in(3.0, &g).unwrap();
        assert!(out);
        let r = d.cells(&g).unwrap();
        assert!(r.clipped);
        assert_eq!((r.start[0], r.end[0]), (0, 16));
        assert!(!q.cells(&g).unwrap().clipped);
    }

    #[test]
    fn averages() {
        let g = GridSpec::line(-2.0, 3.0, 1.0 / 256.0).unwrap();
        let c = GridFunction::constant(&g, 2.5);
        let q = Cube::interval(-1.0, 0.75).unwrap();
        assert!((cube_average(&c, &q).unwrap() - 2.5).abs() < 1e-14);
        let x = GridFunction::from_fn(&g, |p| p[0]).unwrap();
        let unit = Cube::interval(0.0, 1.0).unwrap();
        assert!((cube_average(&x, &unit).unwrap() - 0.5).abs() <= g.h());
        let ind = GridFunction::indicator(&g, &unit);
        let two = Cube::interval(0.0, 2.0).unwrap();
        assert!((cube_average(&ind, &two).unwrap() - 0.5).abs() <= g.h());
        let far = Cube::interval(10.0, 11.0).unwrap();
        assert!(matches!(cube_average(&c, &far), Err(Error::EmptyCube)));
    }

    proptest! {
        #[test]
        fn dilation_composes(a in 0.1f64..4.0, b in 0.1f64..4.0, c in -3.0f64..3.0) {
            let q = Cube::interval(c, c + 0.5).unwrap();
            let lhs = q.dilate(a).unwrap().dilate(b).unwrap();
            let rhs = q.dilate(a * b).unwrap();
            prop_assert_eq!(lhs.center(), rhs.center());
            prop_assert!((lhs.side() - rhs.side()).abs() <= 1e-15 * rhs.side());
        }

        #[test]
        fn dyadic_dilation_composes_exactly(i in -3i32..3, j in -3i32..3) {
            let q = Cube::new(&[0.25, -1.0], 0.75).unwrap();
            let (a, b) = (2f64.powi(i), 2f64.powi(j));
            prop_assert_eq!(q.dilate(a).unwrap().dilate(b).unwrap(), q.dilate(a * b).unwrap());
        }

        #[test]
        fn average_lies_between_extremes(seed in 0u64..1000, lo in 0usize..100, w in 1usize..100) {
            let g = GridSpec::line(0.0, 1.0, 1.0 / 256.0).unwrap();
            let f = GridFunction::from_fn(&g, |x| (x[0] * 37.0 + seed as f64).sin() * 5.0).unwrap();
            let q = Cube::new(&[lo as f64 / 256.0], w as f64 / 256.0).unwrap();
            let avg = cube_average(&f, &q).unwrap();
            let r = q.cells(&g).unwrap();
            let vals: Vec<f64> = (r.start[0]..r.end[0]).map(|k| f.samples()[k]).collect();
            let mn = vals.iter().copied().fold(f64::INFINITY, f64::min);
            let mx = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(avg >= mn - 1e-12 && avg <= mx + 1e-12);
        }
    }
}
