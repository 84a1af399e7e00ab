use approx::assert_relative_eq;
use proptest::prelude::*;

use super::*;
use crate::grid::{Cube, GridFunction, GridSpec, MollifierSpec};
use crate::operators::hl_maximal;
use crate::varlebesgue::ExponentSpec;

fn big_box(cells_per_unit: u32) -> GridSpec {
    GridSpec::line(-8.0, 8.0, 1.0 / cells_per_unit as f64).unwrap()
}

fn step_atom(spec: &GridSpec) -> Atom {
    let q = Cube::interval(0.0, 1.0).unwrap();
    let raw = Profile::Steps {
        m: 2,
        values: vec![1.0, -1.0],
    }
    .realize(spec, &q)
    .unwrap();
    Atom::new(&raw, q, 0).unwrap()
}

#[test]
fn generator_contract() {
    let g = big_box(32);
    let one = random_atomic_sum(&g, 1, 1, 0, &ScalePolicy::default()).unwrap();
    assert_eq!(one.len(), 1);
    one.terms()[0].1.verify().unwrap();

    let many = random_atomic_sum(&g, 2, 16, 1, &ScalePolicy::default()).unwrap();
    assert_eq!(many.len(), 16);
    for (l, a) in many.terms() {
        assert!(*l >= 0.1 && *l <= 10.0);
        a.verify().unwrap();
        let q = a.cube();
        assert!(q.corner()[0] >= -4.0 && q.corner()[0] + q.side() <= 4.0);
        let qq = q.double_star();
        assert!(qq.corner()[0] >= -8.0 && qq.corner()[0] + qq.side() <= 8.0);
    }

    let again = random_atomic_sum(&g, 2, 16, 1, &ScalePolicy::default()).unwrap();
    let (x, y) = (many.to_function(), again.to_function());
    assert!(x
        .samples()
        .iter()
        .zip(y.samples())
        .all(|(a, b)| a.to_bits() == b.to_bits()));
}

#[test]
fn generator_in_2d() {
    let g = GridSpec::square(-8.0, 8.0, 1.0 / 16.0).unwrap();
    let s = random_atomic_sum(&g, 9, 6, 2, &ScalePolicy::default()).unwrap();
    for (_, a) in s.terms() {
        a.verify().unwrap();
    }
}

#[test]
fn plan_is_grid_independent() {
    let g = big_box(16);
    let a = AtomicSumPlan::random(&g, 4, 5, 1, &ScalePolicy::default()).unwrap();
    let b = AtomicSumPlan::random(&g.refined(2), 4, 5, 1, &ScalePolicy::default()).unwrap();
    assert_eq!(a, b);
    let coarse = a.realize(&g).unwrap().coefficient_function(1.0).unwrap().integrate();
    let fine = b.realize(&g.refined(2)).unwrap().coefficient_function(1.0).unwrap().integrate();
    assert_relative_eq!(coarse, fine, max_relative = 1e-12);
}

#[test]
fn coefficient_norm_examples() {
    let g = big_box(64);
    let h = g.h();
    let a = step_atom(&g);
    let s = AtomicSum::new(&g, vec![(3.0, a.clone())]).unwrap();
    for p in [0.5, 1.0, 2.0] {
        let n = s.coefficient_norm(&Space::unweighted(&g, p)).unwrap();
        assert!((n - 3.0).abs() <= 3.0 * h, "p={p}: {n}");
    }
    let q2 = Cube::interval(2.0, 4.0).unwrap();
    let raw2 = Profile::Steps {
        m: 2,
        values: vec![-1.0, 1.0],
    }
    .realize(&g, &q2)
    .unwrap();
    let b = Atom::new(&raw2, q2, 0).unwrap();
    let s = AtomicSum::new(&g, vec![(3.0, a.clone()), (0.5, b)]).unwrap();
    let n = s.coefficient_norm(&Space::unweighted(&g, 1.0)).unwrap();
    assert!((n - (3.0 + 0.5 * 2.0)).abs() <= 1e-12);

    // nested: λ1 = 2 on [0,1], λ2 = 3 on [0,1/2], p = 1/2
    let inner = Cube::interval(0.0, 0.5).unwrap();
    let c = Atom::new(
        &Profile::Steps {
            m: 2,
            values: vec![1.0, -1.0],
        }
        .realize(&g, &inner)
        .unwrap(),
        inner,
        0,
    )
    .unwrap();
    let s = AtomicSum::new(&g, vec![(2.0, a), (3.0, c)]).unwrap();
    let n = s.coefficient_norm(&Space::unweighted(&g, 0.5)).unwrap();
    let exact = (0.5 * 5f64.sqrt() + 0.5 * 2f64.sqrt()).powi(2);
    assert_relative_eq!(n, exact, max_relative = 1e-12);
}

#[test]
fn hardy_quasinorm_examples() {
    let g = big_box(64);
    let phi = MollifierSpec::for_grid(&g);
    let space = Space::unweighted(&g, 1.0);
    assert_eq!(hardy_quasinorm(&GridFunction::zeros(&g), &phi, &space).unwrap(), 0.0);

    let a = step_atom(&g);
    let base = hardy_quasinorm(a.samples(), &phi, &space).unwrap();
    let (jmin, jmax) = phi.j_range();
    let wider = phi.with_range(jmin - 1, jmax).unwrap();
    let ext = hardy_quasinorm(a.samples(), &wider, &space).unwrap();
    assert!(base.is_finite() && base > 0.0);
    assert!((ext - base).abs() <= 0.1 * base, "{base} {ext}");

    let smooth = GridFunction::from_fn(&g, |x| (-x[0] * x[0]).exp()).unwrap();
    let l2 = Space::unweighted(&g, 2.0);
    let mphi = hardy_quasinorm(&smooth, &phi, &l2).unwrap();
    let m = l2.norm(&hl_maximal(&smooth)).unwrap();
    let plain = l2.norm(&smooth).unwrap();
    assert!(mphi >= plain * 0.99);
    assert!(mphi <= phi.domination_constant() * m);
}

#[test]
fn quasi_triangle_inequality() {
    let g = big_box(16);
    let phi = MollifierSpec::for_grid(&g);
    let pw = ExponentSpec::parse("piecewise:0.6;[-1,1]=1.5").unwrap();
    let spaces = [
        Space::unweighted(&g, 1.0),
        Space::unweighted(&g, 2.0),
        Space::unweighted(&g, 0.5),
        Space::Variable(pw.sample(&g).unwrap()),
    ];
    for seed in 0..100u64 {
        let s = random_atomic_sum(&g, seed, 3, 1, &ScalePolicy::default()).unwrap();
        for sp in &spaces {
            let e = sp.subadditive_power();
            let total = hardy_quasinorm(&s.to_function(), &phi, sp).unwrap().powf(e);
            let parts: f64 = s
                .terms()
                .iter()
                .map(|(l, a)| (l * hardy_quasinorm(a.samples(), &phi, sp).unwrap()).powf(e))
                .sum();
            assert!(total <= parts * (1.0 + 1e-8), "seed {seed}, {}: {total} > {parts}", sp.describe());
        }
    }
}

#[test]
fn dilation_comparison_is_refinement_stable() {
    let g = big_box(16);
    let plan = AtomicSumPlan::random(&g, 17, 8, 0, &ScalePolicy::default()).unwrap();
    let ratio = |spec: &GridSpec| {
        let s = plan.realize(spec).unwrap();
        let sp = Space::unweighted(spec, 0.7);
        let star = sp.norm(&s.coefficient_function(2.0).unwrap()).unwrap();
        star / s.coefficient_norm(&sp).unwrap()
    };
    let (r0, r1) = (ratio(&g), ratio(&g.refine()));
    assert!(r0 >= 1.0 && r0.is_finite());
    assert!((r1 / r0 - 1.0).abs() <= 0.1);
}

#[test]
fn manifest_round_trip() {
    let g = big_box(16);
    let plan = AtomicSumPlan::random(&g, 3, 4, 1, &ScalePolicy::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    plan.write_manifest(&g, dir.path()).unwrap();
    let mut rd = csv::Reader::from_path(dir.path().join("manifest.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rd.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    let sum = plan.realize(&g).unwrap();
    for (row, (_, atom)) in rows.iter().zip(sum.terms()) {
        let f = crate::grid::io::load_binary(dir.path().join(&row[8])).unwrap();
        assert_eq!(f.samples(), atom.samples().samples());
        assert_eq!(row[4].parse::<f64>().unwrap(), atom.cube().side());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn generated_atoms_verify(seed in 0u64..1_000_000, order in -1i32..4) {
        let g = big_box(32);
        let s = random_atomic_sum(&g, seed, 4, order, &ScalePolicy::default()).unwrap();
        for (_, a) in s.terms() {
            prop_assert!(a.verify().is_ok());
        }
    }

    #[test]
    fn coefficient_norm_monotone(seed in 0u64..1_000_000, k in 0usize..4, bump in 0.0f64..5.0) {
        let g = big_box(16);
        let s = random_atomic_sum(&g, seed, 4, 0, &ScalePolicy::default()).unwrap();
        let mut terms = s.terms().to_vec();
        terms[k].0 += bump;
        let t = AtomicSum::new(&g, terms).unwrap();
        for p in [0.5, 1.0, 3.0] {
            let sp = Space::unweighted(&g, p);
            prop_assert!(s.coefficient_norm(&sp).unwrap() <= t.coefficient_norm(&sp).unwrap() * (1.0 + 1e-12));
        }
    }
}
