//! Shared instances for the benchmarks.

use lojex::algebra::{default_variable_names, parse_poly};
use lojex::cvec::{self, CVec};
use lojex::{Complex64, Poly, VarietySpec};

/// A dense-ish polynomial in three variables of total degree 6.
pub fn dense_poly() -> Poly {
    let names = default_variable_names(3);
    parse_poly("(1 + x1 + 2i*x2 - x3)^6 - 3*x1^2*x2*x3^3", &names).unwrap()
}

pub fn parabola_graph() -> VarietySpec {
    VarietySpec::parse_graph(cvec::zeros(2), 1, &["x1^2"]).unwrap()
}

pub fn parabola_implicit() -> VarietySpec {
    VarietySpec::parse_implicit(cvec::zeros(2), &["x2 - x1^2"]).unwrap()
}

pub fn axis() -> VarietySpec {
    VarietySpec::parse_implicit(cvec::zeros(2), &["x2"]).unwrap()
}

/// The paraboloid `{x3 = x1^2}` in `C^3`.
pub fn paraboloid() -> VarietySpec {
    VarietySpec::parse_implicit(cvec::zeros(3), &["x3 - x1^2"]).unwrap()
}

/// A fixed query point off the parabola.
pub fn query() -> CVec {
    vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.05)]
}
