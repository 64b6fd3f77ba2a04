mod common;

use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use qknot::bracket::{
    bracket_a, bracket_a_partitioned, bracket_a_serial, bracket_q, bracket_q_from_states, enhanced_states, f_poly,
    jones, loops_of,
};
use qknot::codecs::{format_gauss, parse_gauss, pd_to_gauss, pd_to_gauss_all};
use qknot::khovanov::build_complex;
use qknot::{Laurent, Mosaic, PlanarDiagram, Var};

fn small_corpus() -> Vec<(String, PlanarDiagram)> {
    corpus().into_iter().filter(|(_, d)| d.crossing_count() <= 8).collect()
}

#[test]
fn pd_round_trips_are_byte_identical() {
    for name in pd_names() {
        let text = std::fs::read_to_string(corpus_dir().join("pd").join(format!("{name}.pd.json"))).unwrap();
        let d = PlanarDiagram::from_json(&text).unwrap();
        let again = PlanarDiagram::from_json(&d.to_json()).unwrap();
        assert_eq!(again.to_json(), d.to_json(), "{name}");
        assert_eq!(d.mirror().mirror(), d, "{name}");
        assert_eq!(d.mirror().writhe(), -d.writhe(), "{name}");
    }
}

#[test]
fn gauss_codes_visit_each_crossing_twice() {
    for (name, d) in corpus() {
        let parts = pd_to_gauss_all(&d);
        assert_eq!(parts.len(), d.component_count(), "{name}");
        let total: usize = parts.iter().map(Vec::len).sum();
        assert_eq!(total, 2 * d.crossing_count(), "{name}");
        if d.component_count() == 1 {
            let code = pd_to_gauss(&d, 0).unwrap();
            let text = format_gauss(&code);
            assert_eq!(parse_gauss(&text).unwrap(), code, "{name}");
            let over = code.iter().filter(|t| matches!(t, qknot::GaussToken::Visit { over: true, .. })).count();
            assert_eq!(over, d.crossing_count(), "{name}");
        }
    }
}

#[test]
fn mosaic_files_extract_consistently() {
    for name in ["circle2", "circle_in_3x3", "trefoil", "trefoil_rh", "trefoil_5x5"] {
        let m = mosaic(name);
        let text = std::fs::read_to_string(corpus_dir().join("mosaic").join(format!("{name}.mosaic"))).unwrap();
        assert_eq!(Mosaic::parse(&m.to_string()).unwrap(), m, "{name}");
        assert_eq!(m.to_string().trim(), text.trim(), "{name}");
        let d = m.to_pd().unwrap();
        assert_eq!(d.crossing_count(), m.crossing_count(), "{name}");
    }
    assert_eq!(jones(&mosaic("trefoil_rh").to_pd().unwrap()).unwrap(), jones(&pd("trefoil_rh")).unwrap());
    assert_eq!(jones(&mosaic("trefoil_5x5").to_pd().unwrap()).unwrap(), jones(&pd("trefoil")).unwrap());
}

#[test]
fn disjoint_circle_multiplies_by_loop_value() {
    let circle = Laurent::q_circle();
    for (name, d) in corpus() {
        let plus = d.with_extra_circle();
        assert_eq!(bracket_q(&plus).unwrap(), &bracket_q(&d).unwrap() * &circle, "{name}");
        assert_eq!(bracket_a(&plus).unwrap(), &bracket_a(&d).unwrap() * &Laurent::delta(), "{name}");
    }
}

#[test]
fn mirror_inverts_the_bracket_variable() {
    for (name, d) in corpus() {
        assert_eq!(bracket_a(&d.mirror()).unwrap(), bracket_a(&d).unwrap().invert_variable(), "{name}");
        assert_eq!(f_poly(&d.mirror()).unwrap(), f_poly(&d).unwrap().invert_variable(), "{name}");
    }
    let v = jones(&pd("figure8")).unwrap();
    assert_eq!(v, v.invert_variable());
}

#[test]
fn state_sums_agree_across_routes() {
    for (name, d) in small_corpus() {
        let serial = bracket_a_serial(&d).unwrap();
        for parts in [1, 3, 7] {
            assert_eq!(bracket_a_partitioned(&d, parts).unwrap(), serial, "{name} parts={parts}");
        }
        assert_eq!(bracket_q_from_states(&d).unwrap(), bracket_q(&d).unwrap(), "{name}");
        let expected: usize = (0..1u64 << d.crossing_count()).map(|s| 1usize << loops_of(&d, s).loop_count).sum();
        let states: Vec<_> = enhanced_states(&d).unwrap().collect();
        assert_eq!(states.len(), expected, "{name}");
        for s in &states {
            assert_eq!((s.j() - s.i() - s.labels.len() as i64).rem_euclid(2), 0, "{name}");
            assert!((0..=d.crossing_count() as i64).contains(&s.i()));
        }
    }
}

#[test]
fn knots_have_integral_jones_exponents() {
    for (name, d) in corpus() {
        let v = jones(&d).unwrap();
        if d.component_count() % 2 == 1 {
            assert_eq!(v.var(), Var::T, "{name}");
        }
    }
}

#[test]
fn shifted_tables_keep_the_betti_numbers() {
    for (name, d) in small_corpus() {
        let cx = build_complex(&d).unwrap();
        let table = cx.homology(false);
        let (np, nm) = d.sign_counts();
        let shifted = table.shifted(np, nm);
        let total: usize = table.rows.iter().map(|r| r.betti).sum();
        assert_eq!(shifted.rows.iter().map(|r| r.betti).sum::<usize>(), total, "{name}");
        assert!(total > 0, "{name}");
    }
}

#[test]
fn eigenspace_amplitude_matches_at_generic_points() {
    for name in ["trefoil", "figure8", "hopf", "curl_pos"] {
        let cx = build_complex(&pd(name)).unwrap();
        let q = Complex64::from_polar(1.0, 1.0);
        let (amp, collapsed) = cx.eigenspace_amplitude(q).unwrap();
        assert!(!collapsed);
        assert!((amp - cx.amplitude(q).unwrap()).norm() < 1e-9, "{name}");
    }
    let (_, collapsed) = build_complex(&pd("trefoil")).unwrap().eigenspace_amplitude(Complex64::new(1.0, 0.0)).unwrap();
    assert!(collapsed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn amplitude_tracks_the_polynomial(k in 0usize..12, theta in 0.0f64..std::f64::consts::TAU) {
        let (name, d) = &small_corpus()[k % small_corpus().len()];
        let cx = build_complex(d).unwrap();
        let q = Complex64::from_polar(1.0, theta);
        let want = bracket_q(d).unwrap().eval(q).unwrap();
        let tol = 1e-9 * cx.states().len() as f64;
        prop_assert!((cx.amplitude(q).unwrap() - want).norm() <= tol, "{}", name);
        prop_assert!((cx.density_trace(q).unwrap() - want).norm() <= tol, "{}", name);
        prop_assert!(cx.check_anticommutation(q).unwrap().pass, "{}", name);
    }

    #[test]
    fn off_circle_points_are_rejected(r in 0.1f64..0.99) {
        let cx = build_complex(&pd("trefoil")).unwrap();
        prop_assert!(cx.amplitude(Complex64::new(r, 0.0)).is_err());
    }
}
