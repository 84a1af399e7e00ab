use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::grid::{Cube, GridFunction, GridSpec};
use crate::weights::{weighted_lp_norm, Weight};

fn unit_line(cells_per_unit: usize) -> GridSpec {
    GridSpec::line(-1.0, 4.0, 1.0 / cells_per_unit as f64).unwrap()
}

fn chi(spec: &GridSpec, a: f64, b: f64) -> GridFunction {
    GridFunction::indicator(spec, &Cube::interval(a, b).unwrap())
}

fn two_piece() -> ExponentSpec {
    ExponentSpec::parse("piecewise:2;[0.5,1]=4").unwrap()
}

#[test]
fn modular_examples() {
    let spec = unit_line(256);
    let h = spec.h();
    let f = chi(&spec, 0.0, 1.0);
    let p = ExponentFunction::constant(&spec, 2.0).unwrap();
    assert!((modular(&f, 1.0, &p).unwrap() - 1.0).abs() <= h);
    assert!((modular(&f, 2.0, &p).unwrap() - 0.25).abs() <= h);

    let g = chi(&spec, 0.0, 0.5).scale(2.0).add(&chi(&spec, 0.5, 1.0)).unwrap();
    let pp = two_piece().sample(&spec).unwrap();
    // 2^2 * 1/2 + 1^4 * 1/2
    assert!((modular(&g, 1.0, &pp).unwrap() - 2.5).abs() <= h);
    assert!(modular(&g, 0.0, &pp).is_err());
    assert!(modular(&g, -1.0, &pp).is_err());
}

#[test]
fn luxemburg_examples() {
    let spec = unit_line(256);
    let f = chi(&spec, 0.0, 1.0).scale(2.0);
    let p = ExponentFunction::constant(&spec, 2.0).unwrap();
    assert_relative_eq!(luxemburg_norm(&f, &p).unwrap(), 2.0, max_relative = 1e-8);
    assert_eq!(luxemburg_norm(&GridFunction::zeros(&spec), &p).unwrap(), 0.0);

    // root of (3/λ)^4/2 + (1/λ)^2/2 = 1, from an independent scalar solver
    const ROOT: f64 = 2.572_716_385_734_832_3;
    let g = chi(&spec, 0.0, 0.5).add(&chi(&spec, 0.5, 1.0).scale(3.0)).unwrap();
    let pp = two_piece().sample(&spec).unwrap();
    assert_relative_eq!(luxemburg_norm(&g, &pp).unwrap(), ROOT, max_relative = 1e-10);
}

#[test]
fn lh_examples() {
    let spec = GridSpec::line(-8.0, 8.0, 1.0 / 64.0).unwrap();
    let c = ExponentFunction::constant(&spec, 2.0).unwrap().lh_constants();
    assert_eq!((c.c0, c.c_inf, c.p_inf), (0.0, 0.0, 2.0));

    let p = ExponentFunction::from_fn(&spec, |x| {
        2.0 + x[0].sin().powi(2) / (std::f64::consts::E + x[0].abs()).ln()
    })
    .unwrap();
    assert!(p.lh_constants().c_inf <= 1.0 + 1e-9);
}

#[test]
fn jump_exponent_is_not_log_holder() {
    let ps = ExponentSpec::parse("piecewise:2;[0,1]=3").unwrap();
    let c0: Vec<f64> = (4..10)
        .map(|k| {
            let spec = GridSpec::line(-2.0, 2.0, 0.5f64.powi(k)).unwrap();
            ps.sample(&spec).unwrap().lh_constants().c0
        })
        .collect();
    // each halving of h adds log 2 to C_0
    for w in c0.windows(2) {
        assert_relative_eq!(w[1] - w[0], std::f64::consts::LN_2, max_relative = 1e-9);
    }
    assert_eq!(
        crate::weights::classify_growth(&c0),
        crate::weights::Growth::Diverging
    );

    let smooth = ExponentSpec::parse("log:2,1").unwrap();
    let c0: Vec<f64> = (4..10)
        .map(|k| {
            let spec = GridSpec::line(-2.0, 2.0, 0.5f64.powi(k)).unwrap();
            smooth.sample(&spec).unwrap().lh_constants().c0
        })
        .collect();
    // |p'| <= 1/e, so C_0 <= max r log(1/r) / e = 1/e^2
    assert!(c0.iter().all(|&c| c > 0.0 && c <= (-2.0f64).exp()));
    assert_ne!(
        crate::weights::classify_growth(&c0),
        crate::weights::Growth::Diverging
    );
}

#[test]
fn conjugate_examples() {
    let spec = unit_line(16);
    let p2 = ExponentFunction::constant(&spec, 2.0).unwrap();
    assert!(p2.conjugate().unwrap().samples().iter().all(|&v| v == 2.0));
    let p4 = ExponentFunction::constant(&spec, 4.0).unwrap();
    assert!(p4
        .conjugate()
        .unwrap()
        .samples()
        .iter()
        .all(|&v| (v - 4.0 / 3.0).abs() < 1e-15));
    let p3 = ExponentFunction::constant(&spec, 3.0).unwrap();
    let r = p3.ratio(1.5).unwrap().conjugate().unwrap();
    assert!(r.samples().iter().all(|&v| (v - 2.0).abs() < 1e-15));
    let p1 = ExponentFunction::constant(&spec, 1.0).unwrap();
    assert!(p1.conjugate().is_err());
}

#[test]
fn holder_examples() {
    let spec = unit_line(64);
    let p = ExponentFunction::constant(&spec, 2.0).unwrap();
    let f = chi(&spec, 0.0, 1.0);
    let (lhs, rhs) = holder_pairing(&f, &f, &p).unwrap();
    assert_relative_eq!(lhs, 1.0, max_relative = 1e-12);
    assert_relative_eq!(rhs, 2.0, max_relative = 1e-8);
    let g = chi(&spec, 2.0, 3.0);
    let (lhs, rhs) = holder_pairing(&f, &g, &p).unwrap();
    assert_eq!(lhs, 0.0);
    assert!(lhs <= rhs);
}

fn random_piecewise(spec: &GridSpec, rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> GridFunction {
    let pieces = 8;
    let vals: Vec<f64> = (0..pieces).map(|_| rng.random_range(lo..hi)).collect();
    let (a, b) = (spec.lo(0), spec.hi(0));
    GridFunction::from_fn(spec, |x| {
        let k = (((x[0] - a) / (b - a)) * pieces as f64) as usize;
        vals[k.min(pieces - 1)]
    })
    .unwrap()
}

#[test]
fn holder_random_instances() {
    let spec = GridSpec::line(0.0, 4.0, 1.0 / 32.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..500 {
        let f = random_piecewise(&spec, &mut rng, -3.0, 3.0);
        let g = random_piecewise(&spec, &mut rng, -3.0, 3.0);
        let p = ExponentFunction::new(random_piecewise(&spec, &mut rng, 1.1, 6.0)).unwrap();
        let (lhs, rhs) = holder_pairing(&f, &g, &p).unwrap();
        assert!(lhs <= rhs * (1.0 + 1e-12), "{lhs} > {rhs}");
    }
}

#[test]
fn constant_exponent_collapse() {
    let spec = GridSpec::line(-2.0, 2.0, 1.0 / 64.0).unwrap();
    let one = Weight::unit(&spec);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..20 {
        let f = random_piecewise(&spec, &mut rng, -5.0, 5.0);
        let p0 = rng.random_range(0.5..5.0);
        let p = ExponentFunction::constant(&spec, p0).unwrap();
        assert_relative_eq!(
            luxemburg_norm(&f, &p).unwrap(),
            weighted_lp_norm(&f, p0, &one).unwrap(),
            max_relative = 1e-8
        );
    }
}

#[test]
fn exponent_grammar_round_trip() {
    for s in [
        "const:1.5",
        "log:2,1",
        "piecewise:2;[0.5,1]=4",
        "piecewise:2;[0,1]x[0,1]=3;blend=0.25",
    ] {
        let e = ExponentSpec::parse(s).unwrap();
        assert_eq!(ExponentSpec::parse(&e.to_string()).unwrap(), e);
    }
    assert!(ExponentSpec::parse("cubic:1").is_err());
    assert!(ExponentSpec::parse("piecewise:2;[0,1]x[0,2]=3").is_err());
    let blended = ExponentSpec::parse("piecewise:2;[0,1]=4;blend=0.5").unwrap();
    assert_eq!(blended.value(&[0.5]), 4.0);
    assert_eq!(blended.value(&[1.25]), 3.0);
    assert_eq!(blended.value(&[2.0]), 2.0);
}

#[test]
fn rejects_nonpositive_exponent() {
    let spec = unit_line(8);
    assert!(ExponentFunction::new(GridFunction::zeros(&spec)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_solves_modular_and_is_homogeneous(seed in 0u64..10_000, c in 0.01f64..100.0) {
        let spec = GridSpec::line(-1.0, 1.0, 1.0 / 64.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_piecewise(&spec, &mut rng, -4.0, 4.0);
        let p = ExponentFunction::new(random_piecewise(&spec, &mut rng, 0.6, 5.0)).unwrap();
        let n = luxemburg_norm(&f, &p).unwrap();
        prop_assert!((modular(&f, n, &p).unwrap() - 1.0).abs() <= 1e-8);
        let nc = luxemburg_norm(&f.scale(c), &p).unwrap();
        prop_assert!((nc - c * n).abs() <= 1e-8 * c * n);
    }

    #[test]
    fn norm_is_monotone(seed in 0u64..10_000) {
        let spec = GridSpec::line(-1.0, 1.0, 1.0 / 64.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_piecewise(&spec, &mut rng, -4.0, 4.0);
        let shrink = random_piecewise(&spec, &mut rng, 0.0, 1.0);
        let f = g.mul(&shrink).unwrap();
        let p = ExponentFunction::new(random_piecewise(&spec, &mut rng, 0.6, 5.0)).unwrap();
        prop_assert!(luxemburg_norm(&f, &p).unwrap() <= luxemburg_norm(&g, &p).unwrap() + 1e-10);
    }

    #[test]
    fn conjugate_is_involutive(seed in 0u64..10_000) {
        let spec = GridSpec::line(-1.0, 1.0, 1.0 / 32.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = ExponentFunction::new(random_piecewise(&spec, &mut rng, 1.05, 8.0)).unwrap();
        let back = p.conjugate().unwrap().conjugate().unwrap();
        for (a, b) in p.samples().iter().zip(back.samples()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }
}
