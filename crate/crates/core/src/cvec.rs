//! Small helpers on complex vectors stored as slices.
//!
//! The Hermitian product is `⟨a, b⟩ = Σ a_i · conj(b_i)`, linear in the first
//! argument. The Hermitian norm of `z ∈ C^m` equals the Euclidean norm of its
//! realification in `R^{2m}`.

use num_complex::Complex64;

pub type CVec = Vec<Complex64>;

pub fn hdot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

pub fn norm(a: &[Complex64]) -> f64 {
    norm_sqr(a).sqrt()
}

pub fn sub(a: &[Complex64], b: &[Complex64]) -> CVec {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Complex64], b: &[Complex64]) -> CVec {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Complex64], s: Complex64) -> CVec {
    a.iter().map(|x| x * s).collect()
}

/// `a + s·b`
pub fn axpy(a: &[Complex64], s: Complex64, b: &[Complex64]) -> CVec {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

pub fn zeros(n: usize) -> CVec {
    vec![Complex64::new(0.0, 0.0); n]
}

pub fn unit(n: usize, i: usize) -> CVec {
    let mut v = zeros(n);
    v[i] = Complex64::new(1.0, 0.0);
    v
}

pub fn normalized(a: &[Complex64]) -> Option<CVec> {
    let n = norm(a);
    if n > 0.0 && n.is_finite() {
        Some(a.iter().map(|z| z / n).collect())
    } else {
        None
    }
}

/// Converts `[[re, im], …]` pairs into complex values.
pub fn from_pairs(pairs: &[[f64; 2]]) -> CVec {
    pairs.iter().map(|p| Complex64::new(p[0], p[1])).collect()
}

pub fn to_pairs(v: &[Complex64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn real(values: &[f64]) -> CVec {
    values.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}
