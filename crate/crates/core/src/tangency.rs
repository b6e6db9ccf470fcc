//! Order of tangency of graph manifolds and the exponent bound it implies.
//!
//! For graphs `y = f(u)` and `y = g(u)` over the same parameter space that
//! meet at `u0`, let `s'` be the smallest total degree of a nonvanishing
//! Taylor coefficient of `f − g` at `u0`. The order of tangency is
//! `s = s' − 1`, and the separation exponent of the pair is at least `s'`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AffineMap, Poly, DEFAULT_JET_ORDER};
use crate::cvec;
use crate::error::{Error, Result};
use crate::seed;

/// Jet coefficients with smaller modulus are treated as zero.
pub const JET_ZERO_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyReport {
    /// Truncation degree of the jets.
    #[serde(rename = "K")]
    pub truncation: u32,
    /// `None` when every coefficient up to degree `K` vanishes.
    pub s_prime: Option<u32>,
    pub s: Option<u32>,
    pub exceeds_k: bool,
    pub witness_alpha: Option<Vec<u32>>,
    /// Index of the component of `f − g` carrying the witness.
    pub witness_component: Option<usize>,
    pub witness_modulus: Option<f64>,
}

/// Lower bound on the separation exponent implied by a tangency report.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExponentBound {
    Finite { value: u32 },
    /// Tangency beyond the truncation degree; only `floor = K + 1` is
    /// certified.
    Unbounded { floor: u32 },
}

pub fn order_of_tangency(
    f: &[Poly],
    g: &[Poly],
    center: &[Complex64],
    truncation: u32,
    tol: f64,
) -> Result<TangencyReport> {
    if f.len() != g.len() {
        return Err(Error::dim(f.len(), g.len()));
    }
    if f.is_empty() {
        return Err(Error::invalid("graphs need at least one component"));
    }
    if truncation == 0 {
        return Err(Error::invalid("truncation degree must be at least 1"));
    }
    let p = f[0].num_vars();
    for q in f.iter().chain(g) {
        if q.num_vars() != p {
            return Err(Error::dim(p, q.num_vars()));
        }
    }
    if center.len() != p {
        return Err(Error::dim(p, center.len()));
    }
    let mut best: Option<(u32, Vec<u32>, usize, f64)> = None;
    for (i, (fi, gi)) in f.iter().zip(g).enumerate() {
        let jet = (fi - gi).taylor_jet(center, truncation)?;
        if let Some((alpha, coef)) = jet.lowest_nonvanishing(tol) {
            if best.as_ref().map_or(true, |b| alpha.degree() < b.0) {
                best = Some((alpha.degree(), alpha.exponents().to_vec(), i, coef.norm()));
            }
        }
    }
    match best {
        Some((0, ..)) => Err(Error::Degenerate(
            "the graphs do not pass through a common point at the center".into(),
        )),
        Some((d, alpha, i, modulus)) => Ok(TangencyReport {
            truncation,
            s_prime: Some(d),
            s: Some(d - 1),
            exceeds_k: false,
            witness_alpha: Some(alpha),
            witness_component: Some(i),
            witness_modulus: Some(modulus),
        }),
        None => Ok(TangencyReport {
            truncation,
            s_prime: None,
            s: None,
            exceeds_k: true,
            witness_alpha: None,
            witness_component: None,
            witness_modulus: None,
        }),
    }
}

/// [`order_of_tangency`] at `u0 = 0` with the default truncation and
/// tolerance.
pub fn order_of_tangency_at_origin(f: &[Poly], g: &[Poly]) -> Result<TangencyReport> {
    let p = f.first().map_or(0, Poly::num_vars);
    order_of_tangency(f, g, &cvec::zeros(p), DEFAULT_JET_ORDER, JET_ZERO_TOLERANCE)
}

pub fn exponent_lower_bound(report: &TangencyReport) -> ExponentBound {
    match report.s_prime {
        Some(value) => ExponentBound::Finite { value },
        None => ExponentBound::Unbounded {
            floor: report.truncation + 1,
        },
    }
}

/// Order of vanishing at `0` of `t ↦ p(t · direction)`, or `None` if every
/// coefficient up to degree `K` vanishes.
pub fn line_vanishing_order(p: &Poly, direction: &[Complex64], truncation: u32) -> Result<Option<u32>> {
    if direction.len() != p.num_vars() {
        return Err(Error::dim(p.num_vars(), direction.len()));
    }
    let unit = cvec::normalized(direction).ok_or_else(|| Error::invalid("zero direction"))?;
    let line = AffineMap::new(unit.iter().map(|v| vec![*v]).collect(), cvec::zeros(unit.len()))?;
    let restricted = p.compose_affine(&line)?;
    let order = restricted
        .terms()
        .find(|(m, c)| m.degree() <= truncation && c.norm() > JET_ZERO_TOLERANCE)
        .map(|(m, _)| m.degree());
    Ok(order)
}

/// Smallest line order over `trials` random directions. For a nonzero
/// polynomial this is the degree of its leading form.
pub fn generic_line_order(p: &Poly, trials: usize, seed: u64, truncation: u32) -> Result<u32> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if trials < 3 {
        return Err(Error::invalid("at least 3 trials are needed"));
    }
    let mut best: Option<u32> = None;
    for k in 0..trials {
        let mut rng = seed::rng(seed::derive(seed, &[k as u64]));
        let dir = seed::unit_sphere(&mut rng, p.num_vars());
        if let Some(order) = line_vanishing_order(p, &dir, truncation)? {
            best = Some(best.map_or(order, |b| b.min(order)));
        }
    }
    let order = best.ok_or_else(|| {
        Error::Degenerate(format!("all {trials} random lines vanish beyond degree {truncation}"))
    })?;
    let (r, _) = p.leading_form()?;
    if r <= truncation && order != r {
        return Err(Error::Degenerate(format!(
            "random lines give order {order}, leading form has degree {r}"
        )));
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::parse_poly;

    fn polys(exprs: &[&str], vars: &[&str]) -> Vec<Poly> {
        exprs.iter().map(|e| parse_poly(e, vars).unwrap()).collect()
    }

    #[test]
    fn parabola_against_line() {
        let r = order_of_tangency_at_origin(&polys(&["x1^2"], &["x1"]), &polys(&["0"], &["x1"])).unwrap();
        assert_eq!(r.s_prime, Some(2));
        assert_eq!(r.s, Some(1));
        assert_eq!(r.witness_alpha.as_deref(), Some(&[2][..]));
        assert_eq!(exponent_lower_bound(&r), ExponentBound::Finite { value: 2 });
    }

    #[test]
    fn identical_graphs_exceed_truncation() {
        let f = polys(&["x1^2 + x1^5"], &["x1"]);
        let r = order_of_tangency_at_origin(&f, &f).unwrap();
        assert!(r.exceeds_k && r.s_prime.is_none());
        assert_eq!(exponent_lower_bound(&r), ExponentBound::Unbounded { floor: 13 });
    }

    #[test]
    fn two_parameter_witness() {
        let v = ["x1", "x2"];
        let r = order_of_tangency_at_origin(&polys(&["x1*x2 + x1^3"], &v), &polys(&["x1^3"], &v)).unwrap();
        assert_eq!(r.s_prime, Some(2));
        assert_eq!(r.witness_alpha.as_deref(), Some(&[1, 1][..]));
    }

    #[test]
    fn graphs_apart_at_center_are_rejected() {
        let r = order_of_tangency_at_origin(&polys(&["x1 + 1"], &["x1"]), &polys(&["0"], &["x1"]));
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }

    #[test]
    fn line_orders() {
        let v = ["x1", "x2"];
        let p = parse_poly("x2 - x1^2", &v).unwrap();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::default();
        assert_eq!(line_vanishing_order(&p, &[one, one], 12).unwrap(), Some(1));
        let q = parse_poly("x1^2", &v).unwrap();
        assert_eq!(line_vanishing_order(&q, &[zero, one], 12).unwrap(), None);
        assert_eq!(line_vanishing_order(&q, &[one, zero], 12).unwrap(), Some(2));
        assert!(line_vanishing_order(&q, &[zero, zero], 12).is_err());
    }

    #[test]
    fn generic_orders() {
        let v = ["x1", "x2"];
        assert_eq!(generic_line_order(&parse_poly("x1*x2 + x1^3", &v).unwrap(), 5, 1, 12).unwrap(), 2);
        assert_eq!(generic_line_order(&parse_poly("x1^2", &v).unwrap(), 5, 1, 12).unwrap(), 2);
        assert_eq!(generic_line_order(&parse_poly("3", &v).unwrap(), 5, 1, 12).unwrap(), 0);
    }
}
