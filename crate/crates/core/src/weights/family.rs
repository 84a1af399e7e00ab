use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Cube, GridSpec};

/// Seed used by [`CubeFamily::standard`].
pub const DEFAULT_FAMILY_SEED: u64 = 0x5eed_cafe;

/// Random cubes added per dyadic side in the standard family.
pub const DEFAULT_RANDOM_PER_LEVEL: usize = 1000;

/// Finite family of grid-aligned cubes inside the box, grouped by side
/// length in cells. Stands in for the quantifier "for every cube".
#[derive(Clone, Debug)]
pub struct CubeFamily {
    spec: GridSpec,
    groups: Vec<SideGroup>,
    descriptor: String,
}

/// All cubes of one side length, by first cell.
#[derive(Clone, Debug)]
pub struct SideGroup {
    pub side: usize,
    pub starts: Vec<[usize; 2]>,
}

fn mix(seed: u64, j: i64) -> u64 {
    seed ^ (j as u64).wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_mul(0xbf58_476d_1ce4_e5b9)
}

impl CubeFamily {
    /// Every dyadic cube `2^{-j}(k + [0,1)^n)` lying in the box with side
    /// at least `h`, plus `random_per_level` random cubes of each dyadic
    /// side. Random corners sit on a lattice of spacing `max(side/8, h)`,
    /// so for sides of at least `8h` the random cubes do not depend on the
    /// grid spacing and the family only grows under refinement.
    pub fn dyadic(spec: &GridSpec, random_per_level: usize, seed: u64) -> Self {
        let h = spec.h();
        let dim = spec.dim();
        let shape = spec.shape();
        let mut groups = Vec::new();
        let max_cells = (0..dim).map(|a| shape[a]).min().unwrap_or(1);
        let mut side = 1usize;
        while side <= max_cells {
            let s = side as f64 * h;
            let j = -(s.log2().round() as i64);
            let mut starts = Vec::new();
            // dyadic cubes: absolute corners at multiples of s
            let mut axis_starts: [Vec<usize>; 2] = [Vec::new(), vec![0]];
            for a in 0..dim {
                let k0 = (spec.lo(a) / s).ceil() as i64;
                let k1 = (spec.hi(a) / s).floor() as i64 - 1;
                let mut v = Vec::new();
                for k in k0..=k1 {
                    let off = (k as f64 * s - spec.lo(a)) / h;
                    let r = off.round();
                    if (off - r).abs() < 1e-6 && r >= 0.0 && r as usize + side <= shape[a] {
                        v.push(r as usize);
                    }
                }
                axis_starts[a] = v;
            }
            for &i in &axis_starts[0] {
                for &k in &axis_starts[1] {
                    starts.push([i, k]);
                }
            }
            if random_per_level > 0 {
                let step = (side / 8).max(1);
                let mut rng = ChaCha8Rng::seed_from_u64(mix(seed, j));
                for _ in 0..random_per_level {
                    let mut st = [0usize; 2];
                    for a in 0..dim {
                        let slots = (shape[a] - side) / step;
                        st[a] = rng.random_range(0..=slots) * step;
                    }
                    starts.push(st);
                }
            }
            if !starts.is_empty() {
                groups.push(SideGroup { side, starts });
            }
            side *= 2;
        }
        Self {
            spec: spec.clone(),
            groups,
            descriptor: format!("dyadic+random{random_per_level}@{seed:#x}"),
        }
    }

    /// Default family: dyadic cubes plus 1000 random cubes per dyadic side.
    pub fn standard(spec: &GridSpec) -> Self {
        Self::dyadic(spec, DEFAULT_RANDOM_PER_LEVEL, DEFAULT_FAMILY_SEED)
    }

    /// Dyadic cubes only.
    pub fn dyadic_only(spec: &GridSpec) -> Self {
        let mut f = Self::dyadic(spec, 0, 0);
        f.descriptor = "dyadic".into();
        f
    }

    /// A family built from explicit cubes; each must be grid-aligned and
    /// inside the box.
    pub fn explicit(spec: &GridSpec, cubes: &[Cube]) -> Result<Self> {
        let mut groups: Vec<SideGroup> = Vec::new();
        for q in cubes {
            if !q.inside(spec) {
                return Err(Error::InvalidParameter(format!(
                    "cube with center {:?} and side {} leaves the box",
                    q.center(),
                    q.side()
                )));
            }
            let r = q.cells(spec)?;
            let side = r.width();
            let aligned = (q.side() / spec.h() - side as f64).abs() < 1e-9
                && (0..spec.dim()).all(|a| {
                    let off = (q.corner()[a] - spec.lo(a)) / spec.h();
                    r.end[a] - r.start[a] == side && (off - off.round()).abs() < 1e-9
                });
            if !aligned {
                return Err(Error::InvalidParameter(format!(
                    "cube of side {} is not aligned to spacing {}",
                    q.side(),
                    spec.h()
                )));
            }
            match groups.iter_mut().find(|g| g.side == side) {
                Some(g) => g.starts.push(r.start),
                None => groups.push(SideGroup {
                    side,
                    starts: vec![r.start],
                }),
            }
        }
        groups.sort_by_key(|g| g.side);
        Ok(Self {
            spec: spec.clone(),
            groups,
            descriptor: format!("explicit{}", cubes.len()),
        })
    }

    /// Restricts to cubes of side at least `min_side` (absolute length).
    pub fn coarser_than(&self, min_side: f64) -> Self {
        let h = self.spec.h();
        let groups = self
            .groups
            .iter()
            .filter(|g| g.side as f64 * h >= min_side * (1.0 - 1e-12))
            .cloned()
            .collect();
        Self {
            spec: self.spec.clone(),
            groups,
            descriptor: format!("{}|side>={min_side}", self.descriptor),
        }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn groups(&self) -> &[SideGroup] {
        &self.groups
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn len(&self) -> usize {
        self.groups.iter().map(|g| g.starts.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cubes as geometric objects.
    pub fn cubes(&self) -> Vec<Cube> {
        let h = self.spec.h();
        let dim = self.spec.dim();
        let mut out = Vec::with_capacity(self.len());
        for g in &self.groups {
            for st in &g.starts {
                let corner: Vec<f64> = (0..dim)
                    .map(|a| self.spec.lo(a) + st[a] as f64 * h)
                    .collect();
                out.push(Cube::new(&corner, g.side as f64 * h).expect("positive side"));
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_counts_on_unit_box() {
        let g = GridSpec::line(-1.0, 1.0, 0.25).unwrap();
        let f = CubeFamily::dyadic_only(&g);
        // sides 1/4, 1/2, 1, 2: 8 + 4 + 2 + 0 (no dyadic interval of length 2 fits)
        let counts: Vec<(usize, usize)> = f.groups().iter().map(|g| (g.side, g.starts.len())).collect();
        assert_eq!(counts, vec![(1, 8), (2, 4), (4, 2)]);
        for q in f.cubes() {
            assert!(q.inside(&g));
        }
    }

    #[test]
    fn random_cubes_are_stable_under_refinement() {
        let g = GridSpec::line(-4.0, 4.0, 1.0 / 16.0).unwrap();
        let a = CubeFamily::standard(&g).coarser_than(0.5);
        let b = CubeFamily::standard(&g.refine()).coarser_than(0.5);
        let ca = a.cubes();
        let cb = b.cubes();
        assert_eq!(ca.len(), cb.len());
        for (x, y) in ca.iter().zip(&cb) {
            assert!((x.corner()[0] - y.corner()[0]).abs() < 1e-12);
            assert_eq!(x.side(), y.side());
        }
    }

    #[test]
    fn explicit_rejects_misaligned() {
        let g = GridSpec::line(0.0, 1.0, 0.25).unwrap();
        assert!(CubeFamily::explicit(&g, &[Cube::interval(0.1, 0.35).unwrap()]).is_err());
        let f = CubeFamily::explicit(&g, &[Cube::interval(0.25, 0.75).unwrap()]).unwrap();
        assert_eq!(f.len(), 1);
    }
}
