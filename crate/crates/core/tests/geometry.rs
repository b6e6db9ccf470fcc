mod common;

use common::{c, close, point};
use lojex::cvec;
use lojex::geometry::{
    angle, lemma1_bound_check, min_angle_hyperplane_through, orthonormal_frame, parametrization,
    sample_generic_hyperplane, Lemma1Outcome,
};
use lojex::{Complex64, Hyperplane};
use proptest::prelude::*;

fn dims() -> impl Strategy<Value = usize> {
    2usize..=5
}

#[test]
fn rejects_bad_hyperplanes() {
    assert!(Hyperplane::new(vec![c(0.0, 0.0)], vec![c(1.0, 0.0)]).is_err());
    assert!(Hyperplane::new(cvec::zeros(2), cvec::zeros(2)).is_err());
    assert!(Hyperplane::new(cvec::zeros(2), cvec::zeros(3)).is_err());
    assert!(Hyperplane::coordinate(cvec::zeros(2), 2).is_err());
}

#[test]
fn angle_requires_a_common_base_point() {
    let h = Hyperplane::coordinate(cvec::zeros(2), 0).unwrap();
    let k = Hyperplane::coordinate(cvec::real(&[1.0, 0.0]), 0).unwrap();
    assert!(angle(&h, &k).is_err());
}

#[test]
fn min_angle_handles_degenerate_positions() {
    let h0 = Hyperplane::coordinate(cvec::zeros(3), 2).unwrap();
    let inside = cvec::real(&[1.0, 2.0, 0.0]);
    assert_eq!(min_angle_hyperplane_through(&inside, &h0).unwrap(), h0);
    let normal_dir = cvec::real(&[0.0, 0.0, 2.0]);
    let h = min_angle_hyperplane_through(&normal_dir, &h0).unwrap();
    assert!(h.contains(&normal_dir, 1e-12));
    assert!((angle(&h0, &h).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    assert!(min_angle_hyperplane_through(&cvec::zeros(3), &h0).is_err());
}

#[test]
fn lemma1_check_reports_each_precondition() {
    let h0 = Hyperplane::coordinate(cvec::zeros(2), 1).unwrap();
    let y0 = cvec::real(&[1.0, 0.0]);
    let reason = |o: Lemma1Outcome| match o {
        Lemma1Outcome::Skip { reason } => reason,
        other => panic!("expected a skip, got {other:?}"),
    };
    let off = cvec::real(&[1.0, 0.5]);
    assert!(reason(lemma1_bound_check(&off, &y0, &h0, 0.1).unwrap()).contains("not on the hyperplane"));
    let far = cvec::real(&[1.0, 0.2]);
    assert!(reason(lemma1_bound_check(&y0, &far, &h0, 0.1).unwrap()).contains("closeness"));
    let flat = cvec::real(&[1.05, 0.0]);
    assert!(reason(lemma1_bound_check(&y0, &flat, &h0, 0.1).unwrap()).contains("angle"));
    // Tilt of 0.08 over ~1: angle ≈ 0.08 ≥ 0.05, and 0.08 ≥ 0.9·tan(0.05).
    let tilted = cvec::real(&[1.0, 0.08]);
    assert!(lemma1_bound_check(&y0, &tilted, &h0, 0.05).unwrap().is_pass());
}

proptest! {
    #[test]
    fn angle_is_symmetric_and_in_range(m in dims(), s1: u64, s2: u64, x0 in point(5, 1.0)) {
        let x0 = &x0[..m];
        let h = sample_generic_hyperplane(m, x0, s1).unwrap();
        let k = sample_generic_hyperplane(m, x0, s2).unwrap();
        let hk = angle(&h, &k).unwrap();
        prop_assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&hk));
        prop_assert!((hk - angle(&k, &h).unwrap()).abs() <= 1e-12);
        prop_assert!(angle(&h, &h).unwrap() <= 1e-7);
    }

    #[test]
    fn angle_ignores_unit_scalars(m in dims(), s1: u64, s2: u64, theta in 0.0..std::f64::consts::TAU, scale in 0.1f64..10.0) {
        let x0 = cvec::zeros(m);
        let h = sample_generic_hyperplane(m, &x0, s1).unwrap();
        let k = sample_generic_hyperplane(m, &x0, s2).unwrap();
        let k2 = Hyperplane::new(x0, cvec::scale(k.normal(), Complex64::from_polar(scale, theta))).unwrap();
        prop_assert!((angle(&h, &k).unwrap() - angle(&h, &k2).unwrap()).abs() <= 1e-12);
    }

    #[test]
    fn angle_obeys_triangle_inequality(m in dims(), s: [u64; 3]) {
        let x0 = cvec::zeros(m);
        let [a, b, d] = s.map(|s| sample_generic_hyperplane(m, &x0, s).unwrap());
        let ab = angle(&a, &b).unwrap();
        let bd = angle(&b, &d).unwrap();
        let ad = angle(&a, &d).unwrap();
        prop_assert!(ad <= ab + bd + 1e-12);
    }

    #[test]
    fn angle_matches_graph_formula(q in point(3, 2.0)) {
        let m = q.len() + 1;
        let h0 = Hyperplane::coordinate(cvec::zeros(m), m - 1).unwrap();
        let mut normal: Vec<Complex64> = q.iter().map(|v| -v.conj()).collect();
        normal.push(c(1.0, 0.0));
        let k = Hyperplane::new(cvec::zeros(m), normal).unwrap();
        let expected = (1.0 / (1.0 + cvec::norm_sqr(&q)).sqrt()).acos();
        prop_assert!((angle(&h0, &k).unwrap() - expected).abs() <= 1e-12);
    }

    #[test]
    fn frame_is_an_isometry_onto_the_hyperplane(m in dims(), s: u64, fs: u64, t1 in point(4, 2.0), t2 in point(4, 2.0), x0 in point(5, 1.0)) {
        let h = sample_generic_hyperplane(m, &x0[..m], s).unwrap();
        let frame = orthonormal_frame(&h, fs);
        let b = frame.basis();
        prop_assert_eq!(b.len(), m - 1);
        for (i, u) in b.iter().enumerate() {
            prop_assert!(cvec::hdot(u, h.normal()).norm() <= 1e-12);
            for (j, v) in b.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((cvec::hdot(u, v) - want).norm() <= 1e-12);
            }
        }
        let (t1, t2) = (&t1[..m - 1], &t2[..m - 1]);
        let (p1, p2) = (frame.point(t1), frame.point(t2));
        prop_assert!(h.contains(&p1, 1e-10));
        prop_assert!((cvec::distance(&p1, &p2) - cvec::distance(t1, t2)).abs() <= 1e-10);
        let back = frame.coordinates(&p1);
        prop_assert!(cvec::distance(&back, t1) <= 1e-10);
        let via_map = parametrization(&frame).apply(t1).unwrap();
        prop_assert!(cvec::distance(&via_map, &p1) <= 1e-12);
    }

    #[test]
    fn projection_lands_on_the_hyperplane(m in dims(), s: u64, x in point(5, 3.0)) {
        let x = &x[..m];
        let h = sample_generic_hyperplane(m, &cvec::zeros(m), s).unwrap();
        let p = h.project(x);
        prop_assert!(h.contains(&p, 1e-12));
        prop_assert!(cvec::distance(&h.project(&p), &p) <= 1e-12);
        prop_assert!((cvec::distance(x, &p) - h.offset(x).norm()).abs() <= 1e-12);
    }

    #[test]
    fn min_angle_hyperplane_is_optimal(m in dims(), s: u64, others in prop::collection::vec(point(5, 1.0), 20), y in point(5, 1.0)) {
        let y = &y[..m];
        let x0 = cvec::zeros(m);
        let h0 = sample_generic_hyperplane(m, &x0, s).unwrap();
        prop_assume!(cvec::norm(y) > 1e-3);
        let best = min_angle_hyperplane_through(y, &h0).unwrap();
        prop_assert!(best.contains(y, 1e-10));
        let a = angle(&h0, &best).unwrap();
        // sin of the optimal angle is the relative offset of y from h0.
        let sin = h0.offset(y).norm() / cvec::norm(y);
        prop_assert!((a.sin() - sin).abs() <= 1e-10);
        for w in &others {
            // A random hyperplane through y: project a random normal so it is orthogonal to y.
            let w = &w[..m];
            let yu = cvec::normalized(y).unwrap();
            let n = cvec::axpy(w, -cvec::hdot(w, &yu), &yu);
            if let Ok(k) = Hyperplane::new(x0.clone(), n) {
                prop_assert!(angle(&h0, &k).unwrap() >= a - 1e-10);
            }
        }
    }

    #[test]
    fn generic_hyperplane_is_seed_stable(m in dims(), s: u64) {
        let x0 = cvec::zeros(m);
        let a = sample_generic_hyperplane(m, &x0, s).unwrap();
        let b = sample_generic_hyperplane(m, &x0, s).unwrap();
        prop_assert_eq!(a.normal(), b.normal());
        prop_assert!(close(c(cvec::norm(a.normal()), 0.0), c(1.0, 0.0), 1e-14));
    }
}
