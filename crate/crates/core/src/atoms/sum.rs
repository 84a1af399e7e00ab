use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::atom::Atom;
use super::space::Space;
use crate::error::{Error, Result};
use crate::grid::{io, Cube, GridFunction, GridSpec};

/// A finite sum `Σ λ_i a_i` of atoms on one grid.
#[derive(Clone, Debug)]
pub struct AtomicSum {
    spec: GridSpec,
    terms: Vec<(f64, Atom)>,
}

impl AtomicSum {
    pub fn new(spec: &GridSpec, terms: Vec<(f64, Atom)>) -> Result<Self> {
        for (l, a) in &terms {
            if !(*l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidParameter(format!("coefficient {l}")));
            }
            if a.spec() != spec {
                return Err(Error::SpecMismatch);
            }
        }
        Ok(Self {
            spec: spec.clone(),
            terms,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn terms(&self) -> &[(f64, Atom)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Multiplies every coefficient by `c > 0`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            &self.spec,
            self.terms.iter().map(|(l, a)| (l * c, a.clone())).collect(),
        )
    }

    /// `f = Σ λ_i a_i`.
    pub fn to_function(&self) -> GridFunction {
        let mut f = GridFunction::zeros(&self.spec);
        for (l, a) in &self.terms {
            f.axpy(*l, a.samples()).expect("same grid");
        }
        f
    }

    /// `Σ λ_i χ_{τ Q_i}`, with the dilated cubes clipped to the box.
    pub fn coefficient_function(&self, tau: f64) -> Result<GridFunction> {
        let mut f = GridFunction::zeros(&self.spec);
        for (l, a) in &self.terms {
            let q = a.cube().dilate(tau)?;
            f.axpy(*l, &GridFunction::indicator(&self.spec, &q))?;
        }
        Ok(f)
    }

    /// `‖Σ λ_i χ_{Q_i}‖_X`.
    pub fn coefficient_norm(&self, space: &Space) -> Result<f64> {
        space.norm(&self.coefficient_function(1.0)?)
    }
}

/// `‖Σ λ_i χ_{Q_i}‖_X`.
pub fn coefficient_norm(sum: &AtomicSum, space: &Space) -> Result<f64> {
    sum.coefficient_norm(space)
}

/// Shape of a raw atom profile on the reference cube `[-1, 1]^n`.
#[derive(Clone, Debug, PartialEq)]
pub enum Profile {
    /// `P(u) Π(1 - u_i²)` with `P` of degree <= 3; coefficients follow
    /// [`super::multi_indices`]`(n, 3)`.
    PolyBump(Vec<f64>),
    /// Piecewise constant on an `m^n` grid of sub-cubes, row-major.
    Steps { m: usize, values: Vec<f64> },
}

impl Profile {
    pub fn id(&self) -> &'static str {
        match self {
            Profile::PolyBump(_) => "polybump",
            Profile::Steps { .. } => "steps",
        }
    }

    /// Value at reference coordinates `u ∈ [-1, 1]^n`.
    pub fn value(&self, u: &[f64]) -> f64 {
        match self {
            Profile::PolyBump(c) => {
                let basis = super::multi_indices(u.len(), 3);
                let mut p = 0.0;
                for (coef, b) in c.iter().zip(basis) {
                    let mut m = *coef;
                    for (a, &e) in b.iter().take(u.len()).enumerate() {
                        m *= u[a].powi(e as i32);
                    }
                    p += m;
                }
                p * u.iter().map(|x| 1.0 - x * x).product::<f64>()
            }
            Profile::Steps { m, values } => {
                let mut k = 0;
                for &x in u {
                    let i = (((x + 1.0) * 0.5 * *m as f64).floor() as usize).min(m - 1);
                    k = k * m + i;
                }
                values[k]
            }
        }
    }

    /// Samples the profile on the cells of `q`, zero elsewhere.
    pub fn realize(&self, spec: &GridSpec, q: &Cube) -> Result<GridFunction> {
        let mut out = vec![0.0; spec.len()];
        let r = q.cells(spec)?;
        let dim = spec.dim();
        r.for_each(spec, |k| {
            let x = spec.point(k);
            let u: Vec<f64> = (0..dim)
                .map(|a| (x[a] - q.center()[a]) / (0.5 * q.side()))
                .collect();
            out[k] = self.value(&u);
        });
        GridFunction::new(spec.clone(), out)
    }
}

/// Ranges for random cube sides (`2^e` for `e` in the exponent range) and
/// log-uniform coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalePolicy {
    pub side_exp_min: i32,
    pub side_exp_max: i32,
    pub lambda_min: f64,
    pub lambda_max: f64,
}

impl Default for ScalePolicy {
    fn default() -> Self {
        Self {
            side_exp_min: -2,
            side_exp_max: 0,
            lambda_min: 0.1,
            lambda_max: 10.0,
        }
    }
}

/// One planned term: coefficient, cube and profile.
#[derive(Clone, Debug, PartialEq)]
pub struct PlannedTerm {
    pub lambda: f64,
    pub cube: Cube,
    pub profile: Profile,
}

/// Grid-independent description of a random atomic sum; realizing it on
/// successive refinements gives the same continuous atoms up to the
/// projection.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicSumPlan {
    pub seed: u64,
    pub order: i32,
    pub terms: Vec<PlannedTerm>,
}

/// Dyadic cube positions inside the inner half of the box whose `Q**`
/// stays in the box, for side `2^e`.
fn placements(spec: &GridSpec, side: f64) -> Vec<Vec<i64>> {
    let dim = spec.dim();
    let reach = 0.5 * side * (2.0 * (dim as f64).sqrt()).powi(2);
    let mut per_axis: Vec<Vec<i64>> = Vec::new();
    for a in 0..dim {
        let (lo, hi) = (spec.lo(a), spec.hi(a));
        let mid = 0.5 * (lo + hi);
        let quarter = 0.25 * (hi - lo);
        let first = ((mid - quarter) / side).ceil() as i64;
        let last = ((mid + quarter) / side).floor() as i64 - 1;
        let ks: Vec<i64> = (first..=last)
            .filter(|&k| {
                let c = (k as f64 + 0.5) * side;
                c - reach >= lo - 1e-12 && c + reach <= hi + 1e-12
            })
            .collect();
        per_axis.push(ks);
    }
    if dim == 1 {
        per_axis[0].iter().map(|&k| vec![k]).collect()
    } else {
        let mut out = Vec::new();
        for &i in &per_axis[0] {
            for &j in &per_axis[1] {
                out.push(vec![i, j]);
            }
        }
        out
    }
}

impl AtomicSumPlan {
    /// Draws `count` terms deterministically from `seed`. Only the box of
    /// `spec` is used, so every refinement of `spec` yields the same plan.
    pub fn random(spec: &GridSpec, seed: u64, count: usize, order: i32, policy: &ScalePolicy) -> Result<Self> {
        if policy.side_exp_min > policy.side_exp_max
            || !(policy.lambda_min > 0.0 && policy.lambda_min <= policy.lambda_max)
        {
            return Err(Error::InvalidParameter(format!("scale policy {policy:?}")));
        }
        let dim = spec.dim();
        let options: Vec<(f64, Vec<Vec<i64>>)> = (policy.side_exp_min..=policy.side_exp_max)
            .map(|e| {
                let side = 2f64.powi(e);
                (side, placements(spec, side))
            })
            .filter(|(_, p)| !p.is_empty())
            .collect();
        if options.is_empty() {
            return Err(Error::InvalidParameter(
                "no cube of the requested sides fits with its double dilation in the box".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (la, lb) = (policy.lambda_min.ln(), policy.lambda_max.ln());
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            let (side, places) = &options[rng.random_range(0..options.len())];
            let ks = &places[rng.random_range(0..places.len())];
            let corner: Vec<f64> = ks.iter().map(|&k| k as f64 * side).collect();
            let cube = Cube::new(&corner, *side)?;
            let lambda = if la == lb { policy.lambda_min } else { rng.random_range(la..lb).exp() };
            let profile = if rng.random_bool(0.5) {
                let nb = super::multi_indices(dim, 3).len();
                Profile::PolyBump((0..nb).map(|_| rng.random_range(-1.0..1.0)).collect())
            } else {
                let m: usize = if rng.random_bool(0.5) { 2 } else { 4 };
                let cells = m.pow(dim as u32);
                loop {
                    let values: Vec<f64> = (0..cells).map(|_| rng.random_range(-1.0..1.0)).collect();
                    // a constant step function would be annihilated
                    if values.iter().any(|v| (v - values[0]).abs() > 1e-3) {
                        break Profile::Steps { m, values };
                    }
                }
            };
            terms.push(PlannedTerm {
                lambda,
                cube,
                profile,
            });
        }
        Ok(Self { seed, order, terms })
    }

    /// Projects every planned profile onto atoms on `spec`.
    pub fn realize(&self, spec: &GridSpec) -> Result<AtomicSum> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let raw = t.profile.realize(spec, &t.cube)?;
                Ok((t.lambda, Atom::new(&raw, t.cube, self.order)?))
            })
            .collect::<Result<Vec<_>>>()?;
        AtomicSum::new(spec, terms)
    }

    /// Writes `manifest.csv` (one row per term) and `atom_<i>.grid`
    /// payloads for the realization on `spec` into `dir`.
    pub fn write_manifest(&self, spec: &GridSpec, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let sum = self.realize(spec)?;
        let mut w = csv::Writer::from_path(dir.join("manifest.csv"))?;
        w.write_record(["index", "lambda", "corner0", "corner1", "side", "order", "profile", "seed", "payload"])?;
        for (i, (t, (_, atom))) in self.terms.iter().zip(sum.terms()).enumerate() {
            let c = t.cube.corner();
            let payload = format!("atom_{i}.grid");
            io::save_binary(atom.samples(), dir.join(&payload))?;
            w.write_record([
                i.to_string(),
                format!("{:e}", t.lambda),
                format!("{}", c[0]),
                c.get(1).map(|v| v.to_string()).unwrap_or_default(),
                format!("{}", t.cube.side()),
                self.order.to_string(),
                t.profile.id().to_string(),
                self.seed.to_string(),
                payload,
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Random atomic sum with `count` terms, deterministic by `seed`.
pub fn random_atomic_sum(
    spec: &GridSpec,
    seed: u64,
    count: usize,
    order: i32,
    policy: &ScalePolicy,
) -> Result<AtomicSum> {
    AtomicSumPlan::random(spec, seed, count, order, policy)?.realize(spec)
}
