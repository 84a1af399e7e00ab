//! Vector-valued maximal inequalities, the cube-sum inequalities and the
//! Grafakos–Kalton type estimates.

use rand::Rng;

use super::config::{Check, Target};
use super::instances::{
    instance_rng, nested_cubes, random_cube, random_lambda, random_nonnegative_in, random_signed_shape, Shape,
};
use super::level::LevelData;
use crate::error::Result;
use crate::grid::{cube_average, lr_combine, Cube, GridFunction};
use crate::operators::{frac_maximal, hl_maximal};

/// Number of functions or cubes in instance `i`.
fn family_size(check: &Check, rng: &mut impl Rng) -> usize {
    check.params().cubes.unwrap_or_else(|| rng.random_range(1..=8))
}

fn reach(check: &Check) -> f64 {
    0.25 * (check.base.hi(0) - check.base.lo(0))
}

/// The random functions `g_k` of a vector-valued instance.
pub fn fs_shapes(check: &Check, i: usize) -> Result<Vec<Shape>> {
    let mut rng = instance_rng(check.seed(), i);
    let k = family_size(check, &mut rng);
    (0..k).map(|_| random_signed_shape(&mut rng, &check.base, reach(check))).collect()
}

/// `(‖(Σ (M_α g_k)^r)^{1/r}‖_target, ‖(Σ |g_k|^r)^{1/r}‖_source)`, with
/// `M_0 = M`.
pub fn vector_maximal(check: &Check, data: &LevelData, shapes: &[Shape]) -> Result<(f64, f64)> {
    let gs: Vec<GridFunction> = shapes.iter().map(|s| s.sample(&data.grid)).collect::<Result<_>>()?;
    let mg: Vec<GridFunction> = if check.target().is_fractional() {
        gs.iter().map(|g| frac_maximal(g, check.alpha)).collect::<Result<_>>()?
    } else {
        gs.iter().map(hl_maximal).collect()
    };
    let lhs = data.target.norm(&lr_combine(&mg, check.r)?)?;
    let rhs = data.source.norm(&lr_combine(&gs, check.r)?)?;
    Ok((lhs, rhs))
}

/// Cubes of a Grafakos–Kalton or cube-sum instance: nested when asked,
/// otherwise overlapping cubes packed near the origin.
fn instance_cubes(check: &Check, rng: &mut impl Rng) -> Result<Vec<Cube>> {
    let k = family_size(check, rng);
    if check.params().nested.unwrap_or(false) {
        nested_cubes(rng, &check.base, k, reach(check))
    } else {
        (0..k).map(|_| random_cube(rng, &check.base, -3, 1, 2.0)).collect()
    }
}

/// Cubes `Q_k` and nonnegative `g_k` supported in them.
pub fn gk_instance(check: &Check, i: usize) -> Result<Vec<(Cube, Shape)>> {
    let mut rng = instance_rng(check.seed(), i);
    let cubes = instance_cubes(check, &mut rng)?;
    Ok(cubes.into_iter().map(|q| (q, random_nonnegative_in(&mut rng, &q))).collect())
}

/// Exponent of the averages: 1, or `q` for the `L^q`-average forms.
fn gk_power(check: &Check) -> f64 {
    match check.target() {
        Target::L4_7 => check.q,
        Target::L4_8 if check.params().variant.as_deref() == Some("variable-q") => check.q,
        _ => 1.0,
    }
}

/// `(‖Σ g_k‖, ‖Σ (⨍_{Q_k} g_k^s)^{1/s} χ_{Q_k}‖)` in the source space.
pub fn grafakos_kalton(data: &LevelData, terms: &[(Cube, Shape)], s: f64) -> Result<(f64, f64)> {
    let mut sum = GridFunction::zeros(&data.grid);
    let mut avg = GridFunction::zeros(&data.grid);
    for (q, shape) in terms {
        let g = shape.sample(&data.grid)?;
        sum.axpy(1.0, &g)?;
        let a = if s == 1.0 {
            cube_average(&g, q)?
        } else {
            cube_average(&g.map(|v| v.powf(s))?, q)?.powf(1.0 / s)
        };
        avg.axpy(a, &GridFunction::indicator(&data.grid, q))?;
    }
    Ok((data.source.norm(&sum)?, data.source.norm(&avg)?))
}

/// Cubes and coefficients of a cube-sum instance.
pub fn cube_sum_instance(check: &Check, i: usize) -> Result<Vec<(Cube, f64)>> {
    let mut rng = instance_rng(check.seed(), i);
    let cubes = instance_cubes(check, &mut rng)?;
    Ok(cubes.into_iter().map(|q| (q, random_lambda(&mut rng))).collect())
}

/// `(‖Σ λ_k |Q_k|^{α/n} χ_{Q_k}‖_target, ‖Σ λ_k χ_{Q_k}‖_source)`.
pub fn fractional_cubes(check: &Check, data: &LevelData, terms: &[(Cube, f64)]) -> Result<(f64, f64)> {
    let n = data.grid.dim() as f64;
    let mut left = GridFunction::zeros(&data.grid);
    let mut right = GridFunction::zeros(&data.grid);
    for (q, l) in terms {
        let chi = GridFunction::indicator(&data.grid, q);
        left.axpy(l * q.volume().powf(check.alpha / n), &chi)?;
        right.axpy(*l, &chi)?;
    }
    Ok((data.target.norm(&left)?, data.source.norm(&right)?))
}

/// `(‖Σ χ_{τQ_k}‖, ‖Σ χ_{Q_k}‖)` in `L^p(w)`.
pub fn dilated_cubes(data: &LevelData, cubes: &[Cube], tau: f64) -> Result<(f64, f64)> {
    let mut left = GridFunction::zeros(&data.grid);
    let mut right = GridFunction::zeros(&data.grid);
    for q in cubes {
        left.axpy(1.0, &GridFunction::indicator(&data.grid, &q.dilate(tau)?))?;
        right.axpy(1.0, &GridFunction::indicator(&data.grid, q))?;
    }
    Ok((data.source.norm(&left)?, data.source.norm(&right)?))
}

/// One instance of a lemma target on one level.
pub fn lemma_instance(check: &Check, data: &LevelData, i: usize) -> Result<Option<(f64, f64)>> {
    let out = match check.target() {
        Target::L4_1 | Target::L4_2 | Target::L4_3 | Target::L4_4 => {
            vector_maximal(check, data, &fs_shapes(check, i)?)?
        }
        Target::R4_5 => {
            let mut rng = instance_rng(check.seed(), i);
            let k = family_size(check, &mut rng);
            let cubes: Vec<Cube> = (0..k)
                .map(|_| random_cube(&mut rng, &check.base, -3, 0, reach(check)))
                .collect::<Result<_>>()?;
            dilated_cubes(data, &cubes, check.params().tau.unwrap_or(2.0))?
        }
        Target::L4_6 | Target::L4_7 | Target::L4_8 => grafakos_kalton(data, &gk_instance(check, i)?, gk_power(check))?,
        Target::L4_9 | Target::L4_10 => fractional_cubes(check, data, &cube_sum_instance(check, i)?)?,
        _ => unreachable!("not a lemma target"),
    };
    Ok(Some(out))
}
