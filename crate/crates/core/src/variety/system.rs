//! Flattened polynomial systems with Jacobians for the inner solvers.

use num_complex::Complex64;

use crate::algebra::Poly;
use crate::linalg::CMat;

#[derive(Clone, Debug)]
struct Flat {
    terms: Vec<(Complex64, Vec<u32>)>,
}

impl Flat {
    fn new(p: &Poly) -> Self {
        Flat {
            terms: p
                .terms()
                .map(|(m, c)| (*c, m.exponents().to_vec()))
                .collect(),
        }
    }

    fn eval(&self, x: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(c, e)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, xi)| if k == 0 { acc } else { acc * xi.powu(k) })
            })
            .sum()
    }
}

/// `F: C^n → C^k` with its holomorphic Jacobian.
#[derive(Clone, Debug)]
pub(crate) struct PolySystem {
    num_vars: usize,
    values: Vec<Flat>,
    // derivs[i][j] = ∂F_i/∂x_j
    derivs: Vec<Vec<Flat>>,
}

impl PolySystem {
    pub(crate) fn new(num_vars: usize, polys: &[Poly]) -> Self {
        let values = polys.iter().map(Flat::new).collect();
        let derivs = polys
            .iter()
            .map(|p| {
                (0..num_vars)
                    .map(|j| Flat::new(&p.partial_derivative(j).expect("index in range")))
                    .collect()
            })
            .collect();
        PolySystem {
            num_vars,
            values,
            derivs,
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.values.len()
    }

    pub(crate) fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub(crate) fn eval(&self, x: &[Complex64]) -> Vec<Complex64> {
        self.values.iter().map(|f| f.eval(x)).collect()
    }

    pub(crate) fn jacobian(&self, x: &[Complex64]) -> CMat {
        CMat::from_fn(self.len(), self.num_vars, |i, j| self.derivs[i][j].eval(x))
    }

    pub(crate) fn residual(&self, x: &[Complex64]) -> f64 {
        self.values.iter().map(|f| f.eval(x).norm()).fold(0.0, f64::max)
    }
}
