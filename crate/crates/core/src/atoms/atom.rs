use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::grid::{CellRange, Cube, GridFunction, GridSpec};

/// Tolerance on `sup |a|` above 1.
pub const SUP_TOL: f64 = 1e-12;
/// Relative tolerance on the centred moments, scaled by `|Q| ℓ(Q)^{|β|}`.
pub const MOMENT_TOL: f64 = 1e-10;
/// Projection output below this fraction of the input sup is degenerate.
pub const ZERO_ATOM_TOL: f64 = 1e-12;

/// An `(N, ∞)` atom: `|a| <= 1`, supported in `Q`, with vanishing moments
/// up to degree `N` (`N = -1` means no moment condition).
#[derive(Clone, Debug)]
pub struct Atom {
    cube: Cube,
    order: i32,
    cells: CellRange,
    samples: GridFunction,
}

/// Multi-indices `β` with `|β| <= order`, graded by degree.
pub fn multi_indices(dim: usize, order: i32) -> Vec<[u32; 2]> {
    let mut out = Vec::new();
    for deg in 0..=order.max(-1) {
        let deg = deg as u32;
        if dim == 1 {
            out.push([deg, 0]);
        } else {
            for i in (0..=deg).rev() {
                out.push([i, deg - i]);
            }
        }
    }
    out
}

fn grid_cells(spec: &GridSpec, cube: &Cube) -> Result<CellRange> {
    let r = cube.cells(spec)?;
    let h = spec.h();
    let expect = cube.side() / h;
    let aligned = (expect - expect.round()).abs() < 1e-9
        && (0..spec.dim()).all(|a| {
            let off = (cube.corner()[a] - spec.lo(a)) / h;
            (off - off.round()).abs() < 1e-9 && r.end[a] - r.start[a] == expect.round() as usize
        });
    if r.clipped || !aligned {
        return Err(Error::InvalidParameter(format!(
            "atom cube (center {:?}, side {}) is not a grid-aligned cube inside the box",
            cube.center(),
            cube.side()
        )));
    }
    Ok(r)
}

/// Scaled centred monomial `((x - c) / ℓ)^β` at flat index `k`.
fn monomial(spec: &GridSpec, cube: &Cube, k: usize, beta: [u32; 2]) -> f64 {
    let x = spec.point(k);
    let mut v = 1.0;
    for a in 0..spec.dim() {
        v *= ((x[a] - cube.center()[a]) / cube.side()).powi(beta[a] as i32);
    }
    v
}

/// Removes the `L²(Q)` projection of `f` onto polynomials of degree
/// `<= order`, in place on the cells of `Q`.
fn project_out(f: &mut [f64], spec: &GridSpec, cube: &Cube, cells: &CellRange, order: i32) -> Result<()> {
    let basis = multi_indices(spec.dim(), order);
    if basis.is_empty() {
        return Ok(());
    }
    let m = basis.len();
    let mut idx = Vec::with_capacity(cells.count());
    cells.for_each(spec, |k| idx.push(k));
    if idx.len() < m {
        // the polynomials span every function on Q
        for &k in &idx {
            f[k] = 0.0;
        }
        return Ok(());
    }
    let phi: Vec<Vec<f64>> = basis
        .iter()
        .map(|&b| idx.iter().map(|&k| monomial(spec, cube, k, b)).collect())
        .collect();
    let gram = DMatrix::from_fn(m, m, |i, j| {
        phi[i].iter().zip(&phi[j]).map(|(a, b)| a * b).sum::<f64>()
    });
    let chol = gram.cholesky().ok_or_else(|| {
        Error::Hypothesis(format!("singular moment Gram matrix for order {order}"))
    })?;
    // two passes: the second removes what rounding left behind
    for _ in 0..2 {
        let rhs = DVector::from_fn(m, |i, _| {
            phi[i].iter().zip(&idx).map(|(p, &k)| p * f[k]).sum::<f64>()
        });
        let c = chol.solve(&rhs);
        for (t, &k) in idx.iter().enumerate() {
            let mut s = 0.0;
            for i in 0..m {
                s += c[i] * phi[i][t];
            }
            f[k] -= s;
        }
    }
    Ok(())
}

impl Atom {
    /// Projects `raw` onto the moment-free subspace on `Q` and normalizes
    /// by the sup norm. `raw` must vanish outside `Q`.
    pub fn new(raw: &GridFunction, cube: Cube, order: i32) -> Result<Self> {
        if order < -1 {
            return Err(Error::InvalidParameter(format!("moment order {order}")));
        }
        let spec = raw.spec();
        if cube.dim() != spec.dim() {
            return Err(Error::InvalidParameter("atom cube dimension mismatch".into()));
        }
        let cells = grid_cells(spec, &cube)?;
        let [n0, n1] = spec.shape();
        for i in 0..n0 {
            for j in 0..n1 {
                if !cells.contains([i, j]) && raw.samples()[spec.flat(i, j)] != 0.0 {
                    return Err(Error::InvalidParameter(
                        "raw profile is not supported in the atom cube".into(),
                    ));
                }
            }
        }
        let input_sup = raw.sup_norm();
        if input_sup == 0.0 {
            return Err(Error::ZeroAtom);
        }
        let mut v = raw.samples().to_vec();
        project_out(&mut v, spec, &cube, &cells, order)?;
        let sup = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if sup < ZERO_ATOM_TOL * input_sup {
            return Err(Error::ZeroAtom);
        }
        for x in &mut v {
            *x /= sup;
        }
        Ok(Self {
            cube,
            order,
            cells,
            samples: GridFunction::new(spec.clone(), v)?,
        })
    }

    /// The zero function viewed as an atom on `Q`.
    pub fn zero(spec: &GridSpec, cube: Cube, order: i32) -> Result<Self> {
        let cells = grid_cells(spec, &cube)?;
        Ok(Self {
            cube,
            order,
            cells,
            samples: GridFunction::zeros(spec),
        })
    }

    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    pub fn cells(&self) -> &CellRange {
        &self.cells
    }

    pub fn samples(&self) -> &GridFunction {
        &self.samples
    }

    pub fn spec(&self) -> &GridSpec {
        self.samples.spec()
    }

    /// `∫ ((x - c_Q)/ℓ(Q))^β a(x) dx`.
    pub fn scaled_moment(&self, beta: [u32; 2]) -> f64 {
        let spec = self.spec();
        let mut s = 0.0;
        self.cells.for_each(spec, |k| {
            s += monomial(spec, &self.cube, k, beta) * self.samples.samples()[k];
        });
        s * spec.cell_volume()
    }

    /// Checks the sup bound, the support and the moment conditions. Moments
    /// are taken about the cube centre, which is equivalent to the
    /// uncentred ones for vanishing purposes and keeps the check
    /// well-conditioned for small cubes far from the origin.
    pub fn verify(&self) -> Result<()> {
        let spec = self.spec();
        let v = self.samples.samples();
        let sup = self.samples.sup_norm();
        if sup > 1.0 + SUP_TOL {
            return Err(Error::Hypothesis(format!("atom sup {sup} exceeds 1")));
        }
        let [n0, n1] = spec.shape();
        for i in 0..n0 {
            for j in 0..n1 {
                if !self.cells.contains([i, j]) && v[spec.flat(i, j)] != 0.0 {
                    return Err(Error::Hypothesis("atom leaks outside its cube".into()));
                }
            }
        }
        let vol = self.cube.volume();
        for beta in multi_indices(spec.dim(), self.order) {
            // scaled moment already carries ℓ^{-|β|}
            let m = self.scaled_moment(beta);
            if m.abs() > MOMENT_TOL * vol {
                return Err(Error::Hypothesis(format!(
                    "moment {beta:?} of size {m:e} exceeds tolerance"
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line() -> GridSpec {
        GridSpec::line(-2.0, 2.0, 1.0 / 64.0).unwrap()
    }

    #[test]
    fn balanced_step_is_kept() {
        let g = line();
        let q = Cube::interval(0.0, 1.0).unwrap();
        let raw = GridFunction::from_fn(&g, |x| {
            if (0.0..0.5).contains(&x[0]) {
                1.0
            } else if (0.5..1.0).contains(&x[0]) {
                -1.0
            } else {
                0.0
            }
        })
        .unwrap();
        let a = Atom::new(&raw, q, 0).unwrap();
        for (x, y) in a.samples().samples().iter().zip(raw.samples()) {
            assert!((x - y).abs() < 1e-14);
        }
        a.verify().unwrap();
    }

    #[test]
    fn constants_and_lines_are_annihilated() {
        let g = line();
        let q = Cube::interval(0.0, 1.0).unwrap();
        let one = GridFunction::indicator(&g, &q);
        assert!(matches!(Atom::new(&one, q, 0), Err(Error::ZeroAtom)));
        let x = one.zip_with(&GridFunction::from_fn(&g, |p| p[0]).unwrap(), |a, b| a * b).unwrap();
        assert!(matches!(Atom::new(&x, q, 1), Err(Error::ZeroAtom)));
        let a = Atom::new(&x, q, 0).unwrap();
        a.verify().unwrap();
        // a ∝ x - 1/2 with sup 1: a = 2(x - 1/2) up to the grid offset
        let h = g.h();
        let k = g.cell_of(&[0.75]).unwrap();
        let xk = g.point(k)[0];
        assert!((a.samples().samples()[k] - (xk - 0.5) / (0.5 - 0.5 * h)).abs() < 1e-12);
        let mean = a.samples().integrate();
        assert!(mean.abs() <= 1e-10);
        let first = a
            .samples()
            .zip_with(&GridFunction::from_fn(&g, |p| p[0]).unwrap(), |u, v| u * v)
            .unwrap()
            .integrate();
        assert!(first.abs() > 0.1);
    }

    #[test]
    fn rejects_bad_support_and_alignment() {
        let g = line();
        let q = Cube::interval(0.0, 1.0).unwrap();
        let wide = GridFunction::indicator(&g, &Cube::interval(0.0, 1.5).unwrap());
        assert!(Atom::new(&wide, q, 0).is_err());
        let off = Cube::interval(0.001, 1.001).unwrap();
        assert!(Atom::new(&GridFunction::zeros(&g), off, 0).is_err());
    }

    #[test]
    fn high_order_2d_moments_vanish() {
        let g = GridSpec::square(-2.0, 2.0, 1.0 / 32.0).unwrap();
        let q = Cube::new(&[1.0, -1.5], 0.5).unwrap();
        let raw = GridFunction::from_fn(&g, |x| {
            if q.contains(&x) {
                (3.0 * x[0]).sin() + x[1] * x[1] * x[0] + (x[0] * x[1]).exp()
            } else {
                0.0
            }
        })
        .unwrap();
        for n in 0..=3 {
            let a = Atom::new(&raw, q, n).unwrap();
            a.verify().unwrap();
            assert!((a.samples().sup_norm() - 1.0).abs() < 1e-15);
        }
        assert_eq!(multi_indices(2, 3).len(), 10);
        assert_eq!(multi_indices(1, -1).len(), 0);
    }
}
