use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub(crate) type CMat = DMatrix<Complex64>;

/// Relative singular-value cutoff for pseudo-inverse solves.
const RCOND: f64 = 1e-13;

/// Minimum-norm least-squares solution of `a · x = b`.
pub(crate) fn lstsq(a: &CMat, b: &[Complex64]) -> Vec<Complex64> {
    let (rows, cols) = a.shape();
    debug_assert_eq!(rows, b.len());
    if rows == 0 || cols == 0 {
        return vec![Complex64::new(0.0, 0.0); cols];
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 || !smax.is_finite() {
        return vec![Complex64::new(0.0, 0.0); cols];
    }
    let eps = smax * RCOND;
    let rhs = DVector::from_column_slice(b);
    match svd.solve(&rhs, eps) {
        Ok(x) => x.iter().cloned().collect(),
        Err(_) => vec![Complex64::new(0.0, 0.0); cols],
    }
}

#[cfg(test)]
pub(crate) fn from_rows(rows: &[Vec<Complex64>], cols: usize) -> CMat {
    DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

/// `A^H v`
pub(crate) fn adjoint_mul(a: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    let (rows, cols) = a.shape();
    (0..cols)
        .map(|j| (0..rows).map(|i| a[(i, j)].conj() * v[i]).sum())
        .collect()
}
