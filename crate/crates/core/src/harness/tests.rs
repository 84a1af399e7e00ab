use super::*;
use crate::atoms::Profile;
use crate::grid::{Cube, GridFunction};
use crate::operators::{frac_maximal, tail_ratio, KernelSpec, OperatorParams};
use crate::Error;

fn one(text: &str) -> Check {
    let mut v = Config::parse(text).unwrap();
    assert_eq!(v.len(), 1);
    v.pop().unwrap()
}

fn chi(q: Cube) -> Shape {
    Shape::Indicator { cube: q, amp: 1.0 }
}

#[test]
fn targets_round_trip() {
    for t in Target::ALL {
        assert_eq!(t.id().parse::<Target>().unwrap(), t);
    }
    assert!("L4.11".parse::<Target>().is_err());
}

#[test]
fn empty_config_is_empty() {
    assert!(Config::parse("").unwrap().is_empty());
    let dir = tempfile::tempdir().unwrap();
    let reports = run_all(&[], dir.path()).unwrap();
    assert!(reports.is_empty());
    assert!(dir.path().join("summary.csv").exists());
}

#[test]
fn fractional_identity_is_enforced() {
    let bad = r#"
        [[check]]
        target = "L4.9"
        parameters = { alpha = 0.5, p = 1.0, q = 3.0 }
    "#;
    match Config::parse(bad) {
        Err(Error::Hypothesis(m)) => assert!(m.contains("1/p - 1/q = alpha/n"), "{m}"),
        other => panic!("{other:?}"),
    }
    let implied = one(
        r#"
        [[check]]
        target = "L4.9"
        parameters = { alpha = 0.5, p = 1.0 }
    "#,
    );
    assert_eq!(implied.q, 2.0);
    // p = 2 with alpha = 1/2 makes q infinite
    let degenerate = "[[check]]\ntarget = \"L4.3\"\nparameters = { alpha = 0.5, p = 2.0 }\n";
    assert!(matches!(Config::parse(degenerate), Err(Error::Hypothesis(_))));
}

#[test]
fn other_hypotheses_are_enforced() {
    for (t, params) in [
        ("L4.1", "p = 1.0"),
        ("L4.6", "p = 1.5"),
        ("L4.7", "p = 3.0, q = 2.0"),
        ("L4.2", "exponent = \"const:0.9\""),
        ("L4.8", "exponent = \"const:1.5\""),
        ("L4.10", "alpha = 0.5, exponent = \"const:2.5\""),
        ("R4.5", "tau = 1.0"),
    ] {
        let text = format!("[[check]]\ntarget = \"{t}\"\nparameters = {{ {params} }}\n");
        assert!(matches!(Config::parse(&text), Err(Error::Hypothesis(_))), "{t} {params}");
    }
    let levels = "[[check]]\ntarget = \"L4.1\"\nrefinementLevels = 1\n";
    assert!(Config::parse(levels).is_err());
    let unknown = "[[check]]\ntarget = \"L4.1\"\nparameters = { colour = 1 }\n";
    assert!(Config::parse(unknown).is_err());
}

#[test]
fn single_indicator_maximal_ratio() {
    let c = one(
        r#"
        [[check]]
        target = "L4.1"
        parameters = { p = 2.0, r = 2.0, h = 0.00390625 }
    "#,
    );
    let data = LevelData::new(&c, 0).unwrap();
    let q = Cube::interval(0.0, 1.0).unwrap();
    let (l, r) = vector_maximal(&c, &data, &[chi(q)]).unwrap();
    let ratio = l / r;
    assert!(ratio > 1.0 && ratio < 4.0, "{ratio}");
}

#[test]
fn constant_component_gives_ratio_one() {
    let c = one("[[check]]\ntarget = \"L4.1\"\nparameters = { h = 0.0625 }\n");
    let data = LevelData::new(&c, 0).unwrap();
    let all = Cube::interval(-8.0, 8.0).unwrap();
    let zero = Shape::Indicator {
        cube: Cube::interval(0.0, 1.0).unwrap(),
        amp: 0.0,
    };
    let (l, r) = vector_maximal(&c, &data, &[zero.clone(), Shape::Indicator { cube: all, amp: 3.0 }, zero]).unwrap();
    assert!((l / r - 1.0).abs() < 1e-10);
}

#[test]
fn fractional_collapses_to_maximal_at_alpha_zero() {
    let fs = one("[[check]]\ntarget = \"L4.1\"\nparameters = { p = 2.0, r = 3.0, weight = \"power:0.5\", h = 0.03125 }\n");
    let frac = one(
        "[[check]]\ntarget = \"L4.3\"\nparameters = { alpha = 0.0, p = 2.0, r = 3.0, weight = \"power:0.25\", h = 0.03125 }\n",
    );
    let (d1, d2) = (LevelData::new(&fs, 0).unwrap(), LevelData::new(&frac, 0).unwrap());
    for i in 0..5 {
        let shapes = fs_shapes(&fs, i).unwrap();
        let a = vector_maximal(&fs, &d1, &shapes).unwrap();
        let b = vector_maximal(&frac, &d2, &shapes).unwrap();
        assert_eq!(a.0.to_bits(), b.0.to_bits());
        assert_eq!(a.1.to_bits(), b.1.to_bits());
    }
    let g = GridFunction::indicator(&d1.grid, &Cube::interval(0.0, 1.0).unwrap());
    assert_eq!(frac_maximal(&g, 0.0).unwrap().samples(), crate::operators::hl_maximal(&g).samples());
}

#[test]
fn fractional_vector_inequality_single_function() {
    let c = one(
        "[[check]]\ntarget = \"L4.3\"\nparameters = { alpha = 0.5, p = 1.3333333333333333, q = 4.0, h = 0.015625 }\n",
    );
    let data = LevelData::new(&c, 0).unwrap();
    let (l, r) = vector_maximal(&c, &data, &[chi(Cube::interval(0.0, 1.0).unwrap())]).unwrap();
    assert!((l / r).is_finite() && l > 0.0);
}

#[test]
fn ratios_are_homogeneous() {
    let c = one("[[check]]\ntarget = \"L4.1\"\nparameters = { p = 2.5, r = 3.0, weight = \"power:0.5\", h = 0.03125 }\n");
    let data = LevelData::new(&c, 0).unwrap();
    for i in 0..5 {
        let s = fs_shapes(&c, i).unwrap();
        let doubled: Vec<Shape> = s.iter().map(|x| x.scaled(2.0)).collect();
        let (l1, r1) = vector_maximal(&c, &data, &s).unwrap();
        let (l2, r2) = vector_maximal(&c, &data, &doubled).unwrap();
        assert!((l2 / l1 - 2.0).abs() < 1e-12 && (r2 / r1 - 2.0).abs() < 1e-12);
        assert!(((l2 / r2) / (l1 / r1) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn grafakos_kalton_single_cube_is_exact() {
    for t in ["L4.6", "L4.7"] {
        let c = one(&format!(
            "[[check]]\ntarget = \"{t}\"\nparameters = {{ p = 0.7, q = 2.0, weight = \"power:0.25\", h = 0.03125 }}\n"
        ));
        let data = LevelData::new(&c, 0).unwrap();
        let q = Cube::interval(0.5, 1.0).unwrap();
        let s = if t == "L4.7" { 2.0 } else { 1.0 };
        let (l, r) = grafakos_kalton(&data, &[(q, chi(q))], s).unwrap();
        assert!((l / r - 1.0).abs() < 1e-10, "{t}: {}", l / r);
    }
}

#[test]
fn q_average_form_is_dominated_by_plain_average_form() {
    let c = one("[[check]]\ntarget = \"L4.7\"\nparameters = { p = 0.7, q = 2.0, cubes = 1, h = 0.03125 }\n");
    let data = LevelData::new(&c, 0).unwrap();
    for i in 0..20 {
        let terms = gk_instance(&c, i).unwrap();
        let (l, r_q) = grafakos_kalton(&data, &terms, 2.0).unwrap();
        let (_, r_1) = grafakos_kalton(&data, &terms, 1.0).unwrap();
        assert!(l / r_q <= l / r_1 * (1.0 + 1e-12));
    }
}

#[test]
fn fractional_cube_sums_closed_forms() {
    let c = one("[[check]]\ntarget = \"L4.9\"\nparameters = { alpha = 0.5, p = 1.0, q = 2.0, h = 0.0625 }\n");
    let data = LevelData::new(&c, 0).unwrap();
    let q = Cube::interval(-1.0, 1.0).unwrap();
    let (l, r) = fractional_cubes(&c, &data, &[(q, 3.0)]).unwrap();
    assert!((l / r - 1.0).abs() < 1e-10);
    let pair = [(Cube::interval(0.0, 1.0).unwrap(), 1.0), (Cube::interval(2.0, 3.0).unwrap(), 1.0)];
    let (l, r) = fractional_cubes(&c, &data, &pair).unwrap();
    let expect = 2f64.powf(0.5) / 2.0;
    assert!((l / r - expect).abs() < 1e-12);
    assert!(l / r < 1.0);
}

#[test]
fn nested_cubes_are_nested() {
    let c = one("[[check]]\ntarget = \"L4.6\"\nparameters = { p = 0.7, cubes = 8, nested = true }\n");
    let terms = gk_instance(&c, 3).unwrap();
    assert_eq!(terms.len(), 8);
    for w in terms.windows(2) {
        let (a, b) = (w[0].0, w[1].0);
        assert_eq!(b.side(), 0.5 * a.side());
        assert!(a.contains(b.center()));
    }
}

#[test]
fn far_field_formulas_agree() {
    let c = one("[[check]]\ntarget = \"L5.2\"\nparameters = { kernel = \"power:0.5\", N = 0, box = 16.0, h = 0.03125 }\n");
    let data = LevelData::new(&c, 0).unwrap();
    let a = tail_atom(&c, &data, 0, 0).unwrap();
    let kernel = KernelSpec::power(1, 0.5).unwrap();
    let rep = tail_ratio(&a, &kernel, &data.phi).unwrap();
    let params = OperatorParams::new(1, 0.5, 0).unwrap();
    let (ell, cq) = (a.cube().side(), a.cube().center()[0]);
    for x in [cq + 3.0 * ell, cq - 4.0 * ell, cq + 6.0] {
        let closed = ell.powf(1.0 + 0.0 + 1.0) / (x - cq).abs().powf(1.0 - 0.5 + 1.0);
        let env = rep.envelope.value_at(&[x]);
        assert!(env / closed < 4.0 && closed / env < 4.0, "x={x}: {env} vs {closed}, tau {}", params.tau);
    }
}

#[test]
fn smoothing_bound_is_scale_free() {
    let c = one("[[check]]\ntarget = \"L5.1\"\nparameters = { kernel = \"hilbert\", N = 1, h = 0.0078125 }\ninstances = { count = 3, seed = 0 }\n");
    let data = LevelData::new(&c, 0).unwrap();
    for i in 0..3 {
        let (hi, lo) = smoothing_instance(&c, &data, i).unwrap();
        assert!(lo > 0.0 && hi <= 2.0 * lo, "{i}: {hi} {lo}");
    }
}

#[test]
fn theorem_ratio_is_homogeneous() {
    let c = one("[[check]]\ntarget = \"T1.1\"\nparameters = { p = 1.0, h = 0.03125, atoms = 2 }\n");
    assert_eq!(theorem_orders(&c).unwrap(), (1, None));
    let data = LevelData::new(&c, 0).unwrap();
    let sum = theorem_sum(&c, &data, 0, 1).unwrap();
    let (l1, r1) = theorem_ratio(&c, &data, &sum).unwrap().unwrap();
    let (l2, r2) = theorem_ratio(&c, &data, &sum.scaled(7.5).unwrap()).unwrap().unwrap();
    assert!(((l2 / r2) / (l1 / r1) - 1.0).abs() < 1e-10);
    assert!(l1 > 0.0 && (l1 / r1).is_finite());
}

#[test]
fn nonconvolution_orders() {
    let c = one("[[check]]\ntarget = \"T1.5\"\nparameters = { p = 1.0 }\n");
    // L = max(floor(0), -1) = 0, atoms carry L + 1 = 1 moments
    assert_eq!(theorem_orders(&c).unwrap(), (1, Some(0)));
    let v = one("[[check]]\ntarget = \"T1.6\"\nparameters = { exponent = \"const:2\" }\n");
    assert_eq!(theorem_orders(&v).unwrap(), (1, Some(-1)));
}

#[test]
fn verdict_rules() {
    let rows = |ratios: &[f64]| -> Vec<Row> {
        ratios
            .iter()
            .enumerate()
            .map(|(l, r)| Row::new(0, l as u32, *r, 1.0))
            .collect()
    };
    let r = rows(&[1.0, 1.05]);
    let (m, t) = trends(&r, 2);
    assert_eq!(m, vec![1.0, 1.05]);
    assert_eq!(verdict(&r, &t), Verdict::Pass);
    let r = rows(&[1.0, 1.5]);
    let (_, t) = trends(&r, 2);
    assert_eq!(verdict(&r, &t), Verdict::Indeterminate);
    let r = rows(&[1.0, 1.5, 2.0]);
    let (_, t) = trends(&r, 3);
    assert_eq!(verdict(&r, &t), Verdict::Fail);
    let r = rows(&[1.0, 1.5, 1.5]);
    let (_, t) = trends(&r, 3);
    assert_eq!(verdict(&r, &t), Verdict::Indeterminate);
    let r = vec![Row::new(0, 0, 1.0, 0.0), Row::new(0, 1, 1.0, 1.0)];
    let (_, t) = trends(&r, 2);
    assert_eq!(verdict(&r, &t), Verdict::Fail);
    assert_eq!(Row::new(0, 0, 0.0, 0.0).ratio, 0.0);
}

#[test]
fn unstable_hypothesis_is_flagged() {
    let h = |level, value| HypothesisRecord {
        level,
        name: "A_2".into(),
        value,
    };
    assert!(unstable_hypotheses(&[h(0, 2.0), h(1, 2.1)]).is_empty());
    assert_eq!(unstable_hypotheses(&[h(0, 2.0), h(1, 3.0)]).len(), 1);
    assert_eq!(unstable_hypotheses(&[h(0, 2.0), h(1, f64::INFINITY)]).len(), 1);
}

#[test]
fn runs_are_deterministic() {
    let text = r#"
        [[check]]
        target = "L4.6"
        refinementLevels = 2
        [check.instances]
        count = 12
        seed = 42
        [check.parameters]
        p = 0.7
        weight = "power:0.25"
        h = 0.03125
    "#;
    let checks = Config::parse(text).unwrap();
    let a = run_check(&checks[0]).unwrap();
    let b = run_check(&checks[0]).unwrap();
    assert_eq!(a.csv_body().unwrap(), b.csv_body().unwrap());
    assert_eq!(a.rows.len(), 24);
    assert!(a.csv_body().unwrap().starts_with("instance,level,lhs,rhs,ratio\n"));
    let dir = tempfile::tempdir().unwrap();
    let reports = run_all(&checks, dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("L4.6.csv")).unwrap();
    assert!(csv.starts_with("# generated-unix: "));
    assert_eq!(csv.split_once('\n').unwrap().1, a.csv_body().unwrap());
    let svg = std::fs::read_to_string(dir.path().join("L4.6.svg")).unwrap();
    assert!(svg.contains("<polyline") && svg.contains(">level<") && svg.contains(">max ratio<"));
    assert_eq!(reports[0].1.verdict, a.verdict);
}

#[test]
fn repeated_targets_get_distinct_files() {
    let text = "[[check]]\ntarget = \"L4.1\"\n[[check]]\ntarget = \"L4.1\"\n";
    let checks = Config::parse(text).unwrap();
    assert_eq!(report_names(&checks), vec!["L4.1", "L4.1-2"]);
}

#[test]
fn shapes_resample_consistently() {
    let c = one("[[check]]\ntarget = \"L4.1\"\nparameters = { h = 0.0625 }\n");
    let coarse = LevelData::new(&c, 0).unwrap();
    let fine = LevelData::new(&c, 1).unwrap();
    for s in fs_shapes(&c, 4).unwrap() {
        let (a, b) = (s.sample(&coarse.grid).unwrap(), s.sample(&fine.grid).unwrap());
        if let Shape::Indicator { .. } | Shape::Steps { profile: Profile::Steps { .. }, .. } = s {
            assert!((a.integrate() - b.integrate()).abs() < 1e-12);
        }
    }
}
