//! Grid-independent random data: every instance is drawn against the
//! coarsest grid and resampled on each refinement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::atoms::Profile;
use crate::error::Result;
use crate::grid::{Cube, GridFunction, GridSpec};

/// Stream for instance `i` of a check seeded with `seed`.
pub fn instance_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64 + 1);
    rng
}

/// A closed-form function that can be sampled on any grid.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape {
    Indicator { cube: Cube, amp: f64 },
    /// `amp · exp(-1/(1 - |x-c|²/ρ²))`.
    Bump { center: [f64; 2], radius: f64, amp: f64 },
    Steps { cube: Cube, profile: Profile },
}

impl Shape {
    pub fn sample(&self, spec: &GridSpec) -> Result<GridFunction> {
        match self {
            Shape::Indicator { cube, amp } => Ok(GridFunction::indicator(spec, cube).scale(*amp)),
            Shape::Bump { center, radius, amp } => {
                let dim = spec.dim();
                GridFunction::from_fn(spec, |x| {
                    let d2: f64 = (0..dim).map(|a| (x[a] - center[a]).powi(2)).sum::<f64>() / (radius * radius);
                    if d2 < 1.0 {
                        amp * (-1.0 / (1.0 - d2)).exp()
                    } else {
                        0.0
                    }
                })
            }
            Shape::Steps { cube, profile } => profile.realize(spec, cube),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        match self {
            Shape::Indicator { cube, amp } => Shape::Indicator {
                cube: *cube,
                amp: amp * c,
            },
            Shape::Bump { center, radius, amp } => Shape::Bump {
                center: *center,
                radius: *radius,
                amp: amp * c,
            },
            Shape::Steps { cube, profile } => Shape::Steps {
                cube: *cube,
                profile: match profile {
                    Profile::Steps { m, values } => Profile::Steps {
                        m: *m,
                        values: values.iter().map(|v| v * c).collect(),
                    },
                    Profile::PolyBump(cs) => Profile::PolyBump(cs.iter().map(|v| v * c).collect()),
                },
            },
        }
    }
}

/// Side exponents available on `base` for cubes inside `[-reach, reach]^n`:
/// at least four cells per side.
fn side_exponents(base: &GridSpec, lo: i32, hi: i32, reach: f64) -> (i32, i32) {
    let finest = (4.0 * base.h()).log2().ceil() as i32;
    let coarsest = (2.0 * reach).log2().floor() as i32;
    let lo = lo.max(finest);
    (lo, hi.min(coarsest).max(lo))
}

/// Dyadic cube of side `2^e`, `e` uniform in `[lo, hi]`, with corner on the
/// lattice `2^e Z^n`, inside `[-reach, reach]^n`.
pub fn random_cube(rng: &mut impl Rng, base: &GridSpec, lo: i32, hi: i32, reach: f64) -> Result<Cube> {
    let (lo, hi) = side_exponents(base, lo, hi, reach);
    let side = 2f64.powi(rng.random_range(lo..=hi));
    let slots = ((2.0 * reach) / side).floor().max(1.0) as i64;
    let start = (-reach / side).ceil() as i64;
    let corner: Vec<f64> = (0..base.dim())
        .map(|_| (start + rng.random_range(0..slots)) as f64 * side)
        .collect();
    Cube::new(&corner, side)
}

/// `count` nested dyadic cubes: each a random child of the previous.
pub fn nested_cubes(rng: &mut impl Rng, base: &GridSpec, count: usize, reach: f64) -> Result<Vec<Cube>> {
    let (lo, hi) = side_exponents(base, -8, 1, reach);
    let top = (lo + count as i32 - 1).min(hi);
    let mut q = random_cube(rng, base, top, top, reach)?;
    let mut out = vec![q];
    for _ in 1..count {
        let half = 0.5 * q.side();
        if half < 4.0 * base.h() {
            break;
        }
        let corner: Vec<f64> = q.corner().iter().map(|c| c + half * rng.random_range(0..2) as f64).collect();
        q = Cube::new(&corner, half)?;
        out.push(q);
    }
    Ok(out)
}

/// Random indicator, bump or signed step function near the centre.
pub fn random_signed_shape(rng: &mut impl Rng, base: &GridSpec, reach: f64) -> Result<Shape> {
    let cube = random_cube(rng, base, -3, 1, reach)?;
    let amp = rng.random_range(0.5..2.0);
    Ok(match rng.random_range(0..3) {
        0 => Shape::Indicator { cube, amp },
        1 => bump_in(&cube, amp),
        _ => {
            let m: usize = if rng.random_bool(0.5) { 2 } else { 4 };
            let values = (0..m.pow(base.dim() as u32)).map(|_| rng.random_range(-1.0..1.0) * amp).collect();
            Shape::Steps {
                cube,
                profile: Profile::Steps { m, values },
            }
        }
    })
}

fn bump_in(cube: &Cube, amp: f64) -> Shape {
    let mut center = [0.0; 2];
    center[..cube.dim()].copy_from_slice(cube.center());
    Shape::Bump {
        center,
        radius: 0.5 * cube.side(),
        amp,
    }
}

/// Random nonnegative function supported in `cube`.
pub fn random_nonnegative_in(rng: &mut impl Rng, cube: &Cube) -> Shape {
    let amp = rng.random_range(0.5..2.0);
    match rng.random_range(0..3) {
        0 => Shape::Indicator { cube: *cube, amp },
        1 => bump_in(cube, amp),
        _ => {
            let m: usize = if rng.random_bool(0.5) { 2 } else { 4 };
            let mut values: Vec<f64> = (0..m.pow(cube.dim() as u32)).map(|_| rng.random_range(0.0..1.0) * amp).collect();
            values[0] += 0.1;
            Shape::Steps {
                cube: *cube,
                profile: Profile::Steps { m, values },
            }
        }
    }
}

/// Log-uniform coefficient in `[0.1, 10]`.
pub fn random_lambda(rng: &mut impl Rng) -> f64 {
    rng.random_range(0.1f64.ln()..10f64.ln()).exp()
}
