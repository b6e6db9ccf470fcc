mod common;

use common::{c, point};
use lojex::cvec::{self, CVec};
use lojex::geometry::Hyperplane;
use lojex::variety::{
    distance, distance_bruteforce, intersect, membership, sample_in_band, sample_on_variety, section,
    DistanceOptions, Form, OracleMethod,
};
use lojex::{Complex64, VarietySpec};
use proptest::prelude::*;

fn origin(m: usize) -> CVec {
    cvec::zeros(m)
}

fn opts(seed: u64) -> DistanceOptions {
    DistanceOptions {
        seed,
        ..Default::default()
    }
}

fn dist(spec: &VarietySpec, x: &[Complex64]) -> f64 {
    distance(spec, x, &opts(0)).unwrap().distance
}

fn parabola_graph() -> VarietySpec {
    VarietySpec::parse_graph(origin(2), 1, &["x1^2"]).unwrap()
}

fn parabola_implicit() -> VarietySpec {
    VarietySpec::parse_implicit(origin(2), &["x2 - x1^2"]).unwrap()
}

#[test]
fn constructors_reject_off_set_base_points() {
    let x0 = cvec::real(&[1.0, 0.0]);
    assert!(VarietySpec::parse_implicit(x0.clone(), &["x2 - x1^2"]).is_err());
    assert!(VarietySpec::parse_graph(origin(2), 1, &["x1^2 + 1"]).is_err());
    assert!(VarietySpec::finite(x0, vec![cvec::real(&[0.0, 1.0])]).is_err());
}

#[test]
fn linear_oracle_is_exact() {
    let line = VarietySpec::parse_implicit(origin(3), &["x2", "x3"]).unwrap();
    let x = vec![c(1.0, 2.0), c(3.0, -1.0), c(0.0, 2.0)];
    let r = distance(&line, &x, &opts(0)).unwrap();
    assert_eq!(r.method, OracleMethod::Linear);
    assert!(r.certified);
    assert!((r.distance - (10.0f64 + 4.0).sqrt()).abs() < 1e-12);
}

#[test]
fn finite_oracle_picks_nearest_point() {
    let pts = vec![origin(2), cvec::real(&[2.0, 0.0])];
    let set = VarietySpec::finite(origin(2), pts).unwrap();
    let r = distance(&set, &cvec::real(&[1.5, 0.0]), &opts(0)).unwrap();
    assert_eq!(r.method, OracleMethod::Finite);
    assert!((r.distance - 0.5).abs() < 1e-15);
}

#[test]
fn intersection_of_graphs_becomes_implicit() {
    let x = parabola_graph();
    let y = VarietySpec::parse_implicit(origin(2), &["x2"]).unwrap();
    let xy = intersect(&x, &y).unwrap();
    assert!(matches!(xy.form(), Form::Implicit { .. }));
    assert!(membership(&xy, &origin(2), 1e-12));
    let p = cvec::real(&[0.3, 0.4]);
    assert!((dist(&xy, &p) - 0.5).abs() < 1e-8);
}

#[test]
fn intersect_rejects_mismatched_base_points() {
    let a = VarietySpec::point(origin(2));
    let b = VarietySpec::point(cvec::real(&[1.0, 0.0]));
    assert!(intersect(&a, &b).is_err());
}

#[test]
fn section_by_coordinate_hyperplane() {
    // {x3 = x1^2} ∩ {x2 = 0} is a parabola in the frame coordinates.
    let x = VarietySpec::parse_implicit(origin(3), &["x3 - x1^2"]).unwrap();
    let h = Hyperplane::coordinate(origin(3), 1).unwrap();
    let s = section(&x, &h, 0).unwrap();
    assert_eq!(s.ambient_dim(), 2);
    let on = sample_on_variety(&s, 1.0, 8, 6, 3).unwrap();
    for p in &on {
        assert!(membership(&s, p, 1e-8));
    }
}

#[test]
fn parametric_sections_are_unsupported() {
    let x = VarietySpec::parametric(
        origin(3),
        1,
        ["t1", "t1^2", "t1^3"]
            .iter()
            .map(|e| lojex::algebra::parse_poly(e, &["t1"]).unwrap())
            .collect(),
    )
    .unwrap();
    let h = Hyperplane::coordinate(origin(3), 0).unwrap();
    assert!(section(&x, &h, 0).is_err());
}

#[test]
fn json_round_trip() {
    for spec in [parabola_graph(), parabola_implicit(), VarietySpec::point(origin(2))] {
        let text = serde_json::to_string(&spec).unwrap();
        let back: VarietySpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
    }
}

#[test]
fn samples_are_seed_stable_and_in_band() {
    let x = parabola_implicit();
    let a = sample_in_band(&x, 1e-3, 1e-1, 32, 17).unwrap();
    let b = sample_in_band(&x, 1e-3, 1e-1, 32, 17).unwrap();
    assert_eq!(a, b);
    for p in &a {
        assert!(membership(&x, p, 1e-8));
        let r = cvec::norm(p);
        assert!(r > 1e-3 / 16.0 && r <= 0.2, "radius {r}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn graph_oracle_matches_bruteforce(k in 1u32..=3, x in point(2, 1.0)) {
        let spec = VarietySpec::parse_graph(origin(2), 1, &[&format!("x1^{k}")]).unwrap();
        let r = cvec::norm(&x);
        prop_assume!(r > 1e-3);
        let fast = dist(&spec, &x);
        let slow = distance_bruteforce(&spec, &x, 2.0 * r, 2000).unwrap().distance;
        prop_assert!((fast - slow).abs() <= 1e-2 * slow.max(1e-12), "{fast} vs {slow}");
    }

    #[test]
    fn implicit_and_graph_forms_agree(x in point(2, 1.0)) {
        let a = dist(&parabola_graph(), &x);
        let b = dist(&parabola_implicit(), &x);
        prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a), "{a} vs {b}");
    }

    #[test]
    fn foot_point_realizes_the_distance(x in point(2, 1.0)) {
        for spec in [parabola_graph(), parabola_implicit()] {
            let r = distance(&spec, &x, &opts(1)).unwrap();
            prop_assert!(membership(&spec, &r.foot_point, 1e-8));
            prop_assert!((cvec::distance(&x, &r.foot_point) - r.distance).abs() <= 1e-12);
        }
    }

    #[test]
    fn distance_is_one_lipschitz(x in point(2, 1.0), y in point(2, 1.0)) {
        let spec = parabola_graph();
        let gap = (dist(&spec, &x) - dist(&spec, &y)).abs();
        prop_assert!(gap <= cvec::distance(&x, &y) + 1e-8);
    }

    #[test]
    fn intersection_is_no_closer(x in point(3, 1.0)) {
        let a = VarietySpec::parse_implicit(origin(3), &["x3 - x1^2"]).unwrap();
        let b = VarietySpec::parse_implicit(origin(3), &["x3"]).unwrap();
        let ab = intersect(&a, &b).unwrap();
        let d = dist(&ab, &x);
        prop_assert!(d + 1e-8 >= dist(&a, &x).max(dist(&b, &x)));
    }

    #[test]
    fn dilation_scales_distances(x in point(2, 1.0), lambda in 0.1f64..10.0) {
        let spec = parabola_graph();
        let scaled = spec.scaled(lambda).unwrap();
        let lx = cvec::scale(&x, c(lambda, 0.0));
        let d = dist(&spec, &x);
        prop_assert!((dist(&scaled, &lx) - lambda * d).abs() <= 1e-7 * (1.0 + lambda * d));
    }

    #[test]
    fn membership_agrees_with_distance(t in common::complex_in(1.0)) {
        let spec = parabola_implicit();
        let on = vec![t, t * t];
        prop_assert!(membership(&spec, &on, 1e-10));
        prop_assert!(dist(&spec, &on) <= 1e-10);
    }
}
