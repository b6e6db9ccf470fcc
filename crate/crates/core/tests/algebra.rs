mod common;

use common::{c, close, point, poly};
use lojex::algebra::{default_variable_names, parse_poly, ParseErrorKind};
use lojex::{AffineMap, Complex64, Jet, Poly};
use proptest::prelude::*;

fn names(n: usize) -> Vec<String> {
    default_variable_names(n)
}

#[test]
fn parses_mixed_expression() {
    let p = parse_poly("(x1 - 2)^2 + 3i*x2 - (-1)", &names(2)).unwrap();
    assert_eq!(p.coefficient(&[2, 0]), c(1.0, 0.0));
    assert_eq!(p.coefficient(&[1, 0]), c(-4.0, 0.0));
    assert_eq!(p.coefficient(&[0, 1]), c(0.0, 3.0));
    assert_eq!(p.coefficient(&[0, 0]), c(5.0, 0.0));
}

#[test]
fn complex_literal_binds_before_power() {
    let p = parse_poly("1+2i^2", &names(1)).unwrap();
    assert_eq!(p.coefficient(&[0]), c(-3.0, 4.0));
}

#[test]
fn parse_errors_carry_kind_and_position() {
    let e = parse_poly("x1 + y", &names(1)).unwrap_err();
    assert_eq!(e.kind, ParseErrorKind::UnknownVariable("y".into()));
    assert_eq!(e.position, 5);
    assert!(matches!(parse_poly("x1^-2", &names(1)).unwrap_err().kind, ParseErrorKind::BadExponent(_)));
    assert!(matches!(parse_poly("x1^1.5", &names(1)).unwrap_err().kind, ParseErrorKind::BadExponent(_)));
    assert!(matches!(parse_poly("x1^", &names(1)).unwrap_err().kind, ParseErrorKind::Syntax(_)));
    assert!(matches!(parse_poly("x1 +", &names(1)).unwrap_err().kind, ParseErrorKind::Syntax(_)));
    assert!(matches!(parse_poly("(x1", &names(1)).unwrap_err().kind, ParseErrorKind::Syntax(_)));
}

#[test]
fn zero_polynomial_has_no_degree_or_leading_form() {
    let z = Poly::zero(2);
    assert!(z.is_zero());
    assert_eq!(z.degree(), None);
    assert!(z.leading_form().is_err());
    assert_eq!(z.to_expr(&names(2)), "0");
}

#[test]
fn eval_checks_dimension() {
    let p = parse_poly("x1*x2", &names(2)).unwrap();
    assert!(p.eval(&[c(1.0, 0.0)]).is_err());
}

#[test]
fn jet_product_truncates() {
    let p = parse_poly("1 + x1", &names(1)).unwrap();
    let j = Jet::from_poly(&p, 2);
    let sq = &(&j * &j) * &j;
    // (1 + x)^3 truncated at degree 2.
    assert_eq!(sq.coefficient(&[0]), c(1.0, 0.0));
    assert_eq!(sq.coefficient(&[1]), c(3.0, 0.0));
    assert_eq!(sq.coefficient(&[2]), c(3.0, 0.0));
    assert_eq!(sq.coefficient(&[3]), c(0.0, 0.0));
}

proptest! {
    #[test]
    fn expression_round_trip(p in poly(3, 6, 4)) {
        let text = p.to_expr(&names(3));
        let q = parse_poly(&text, &names(3)).unwrap();
        prop_assert_eq!(q, p, "{}", text);
    }

    #[test]
    fn eval_is_multiplicative(p in poly(2, 5, 3), q in poly(2, 5, 3), x in point(2, 1.5)) {
        let pq = (&p * &q).eval(&x).unwrap();
        prop_assert!(close(pq, p.eval(&x).unwrap() * q.eval(&x).unwrap(), 1e-10));
    }

    #[test]
    fn eval_is_additive(p in poly(2, 5, 3), q in poly(2, 5, 3), x in point(2, 1.5)) {
        let s = (&p - &q).eval(&x).unwrap();
        prop_assert!(close(s, p.eval(&x).unwrap() - q.eval(&x).unwrap(), 1e-12));
    }

    #[test]
    fn pow_matches_repeated_product(p in poly(2, 3, 2), k in 0u32..4, x in point(2, 1.0)) {
        let direct = p.pow(k).eval(&x).unwrap();
        prop_assert!(close(direct, p.eval(&x).unwrap().powu(k), 1e-9));
    }

    #[test]
    fn compose_respects_eval(
        p in poly(3, 5, 3),
        rows in prop::collection::vec(point(2, 1.0), 3),
        shift in point(3, 1.0),
        t in point(2, 1.0),
    ) {
        let a = AffineMap::new(rows, shift).unwrap();
        let lhs = p.compose_affine(&a).unwrap().eval(&t).unwrap();
        let rhs = p.eval(&a.apply(&t).unwrap()).unwrap();
        prop_assert!(close(lhs, rhs, 1e-9));
    }

    #[test]
    fn derivative_matches_central_difference(p in poly(2, 5, 4), x in point(2, 1.0), i in 0usize..2) {
        let h = 1e-5;
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[i] += h;
        xm[i] -= h;
        let fd = (p.eval(&xp).unwrap() - p.eval(&xm).unwrap()) / (2.0 * h);
        let exact = p.partial_derivative(i).unwrap().eval(&x).unwrap();
        prop_assert!(close(fd, exact, 1e-5), "{fd} vs {exact}");
    }

    #[test]
    fn full_jet_reproduces_shifted_poly(p in poly(2, 5, 3), center in point(2, 1.0), t in point(2, 1.0)) {
        // Per-variable degree ≤ 3 means total degree ≤ 6.
        let jet = p.taylor_jet(&center, 6).unwrap();
        let shifted: Vec<Complex64> = center.iter().zip(&t).map(|(a, b)| a + b).collect();
        prop_assert!(close(jet.to_poly().eval(&t).unwrap(), p.eval(&shifted).unwrap(), 1e-9));
    }

    #[test]
    fn jet_coefficients_are_scaled_derivatives(p in poly(2, 5, 3), center in point(2, 1.0)) {
        let jet = p.taylor_jet(&center, 3).unwrap();
        let dx = p.partial_derivative(0).unwrap();
        let dxy = dx.partial_derivative(1).unwrap();
        prop_assert!(close(jet.coefficient(&[1, 0]), dx.eval(&center).unwrap(), 1e-10));
        prop_assert!(close(jet.coefficient(&[1, 1]), dxy.eval(&center).unwrap(), 1e-10));
    }

    #[test]
    fn leading_form_is_lowest_homogeneous_part(p in poly(3, 6, 4)) {
        prop_assume!(!p.is_zero());
        let (r, lf) = p.leading_form().unwrap();
        prop_assert_eq!(Some(r), p.order());
        prop_assert!(lf.terms().all(|(m, _)| m.degree() == r));
        let rest = &p - &lf;
        prop_assert!(rest.is_zero() || rest.order().unwrap() > r);
    }

    #[test]
    fn leading_form_is_homogeneous_under_scaling(p in poly(2, 5, 4), x in point(2, 1.0), s in 0.1f64..3.0) {
        prop_assume!(!p.is_zero());
        let (r, lf) = p.leading_form().unwrap();
        let sx: Vec<Complex64> = x.iter().map(|v| v * s).collect();
        prop_assert!(close(lf.eval(&sx).unwrap(), lf.eval(&x).unwrap() * s.powi(r as i32), 1e-9));
    }
}
