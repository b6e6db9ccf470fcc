#![allow(dead_code)]

use lojex::{Complex64, Poly};
use proptest::prelude::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Complex numbers with small integer parts, so sums and products of a few
/// of them stay exact in floating point.
pub fn small_complex() -> impl Strategy<Value = Complex64> {
    (-4i32..=4, -4i32..=4).prop_map(|(a, b)| c(a as f64, b as f64))
}

pub fn complex_in(r: f64) -> impl Strategy<Value = Complex64> {
    (-r..r, -r..r).prop_map(|(a, b)| c(a, b))
}

pub fn point(n: usize, r: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(complex_in(r), n)
}

/// Polynomials in `n` variables with up to `terms` terms of degree ≤ `deg`.
pub fn poly(n: usize, terms: usize, deg: u32) -> impl Strategy<Value = Poly> {
    prop::collection::vec((prop::collection::vec(0..=deg, n), small_complex()), 0..=terms).prop_map(
        move |ts| Poly::from_terms(n, ts).unwrap(),
    )
}

pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * (1.0 + a.norm().max(b.norm()))
}
