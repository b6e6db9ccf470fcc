use num_complex::Complex64;

use crate::error::{Error, Result};

/// An affine map `t ↦ A·t + b` from `C^domain_dim` to `C^codomain_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    domain_dim: usize,
    codomain_dim: usize,
    /// Row-major, `codomain_dim` rows of `domain_dim` entries.
    linear: Vec<Vec<Complex64>>,
    translation: Vec<Complex64>,
}

impl AffineMap {
    pub fn new(linear: Vec<Vec<Complex64>>, translation: Vec<Complex64>) -> Result<Self> {
        let codomain_dim = translation.len();
        if codomain_dim == 0 {
            return Err(Error::invalid("affine map needs a positive codomain dimension"));
        }
        if linear.len() != codomain_dim {
            return Err(Error::dim(codomain_dim, linear.len()));
        }
        let domain_dim = linear[0].len();
        if domain_dim == 0 {
            return Err(Error::invalid("affine map needs a positive domain dimension"));
        }
        if let Some(row) = linear.iter().find(|r| r.len() != domain_dim) {
            return Err(Error::dim(domain_dim, row.len()));
        }
        Ok(AffineMap {
            domain_dim,
            codomain_dim,
            linear,
            translation,
        })
    }

    pub fn identity(n: usize) -> Self {
        Self::translation(vec![Complex64::new(0.0, 0.0); n])
    }

    /// `u ↦ u + shift`.
    pub fn translation(shift: Vec<Complex64>) -> Self {
        let n = shift.len();
        let linear = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                    .collect()
            })
            .collect();
        AffineMap {
            domain_dim: n,
            codomain_dim: n,
            linear,
            translation: shift,
        }
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn codomain_dim(&self) -> usize {
        self.codomain_dim
    }

    pub fn linear_part(&self) -> &[Vec<Complex64>] {
        &self.linear
    }

    pub fn translation_part(&self) -> &[Complex64] {
        &self.translation
    }

    pub fn apply(&self, t: &[Complex64]) -> Result<Vec<Complex64>> {
        if t.len() != self.domain_dim {
            return Err(Error::dim(self.domain_dim, t.len()));
        }
        Ok(self
            .linear
            .iter()
            .zip(&self.translation)
            .map(|(row, b)| b + row.iter().zip(t).map(|(a, x)| a * x).sum::<Complex64>())
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_maps_to_translation() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let a = AffineMap::new(
            vec![vec![c(1.0), c(2.0)], vec![c(0.0), c(1.0)], vec![c(3.0), c(0.0)]],
            vec![c(1.0), Complex64::new(0.0, 2.0), c(-1.0)],
        )
        .unwrap();
        assert_eq!(a.apply(&[c(0.0), c(0.0)]).unwrap(), a.translation_part());
        assert!(a.apply(&[c(0.0)]).is_err());
    }

    #[test]
    fn rejects_ragged_linear_part() {
        let c = |x: f64| Complex64::new(x, 0.0);
        assert!(AffineMap::new(vec![vec![c(1.0)], vec![c(1.0), c(2.0)]], vec![c(0.0), c(0.0)]).is_err());
    }
}
