use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::{Monomial, Poly};

/// Default truncation degree for jets.
pub const DEFAULT_JET_ORDER: u32 = 12;

/// Truncated multivariate power series: coefficients for `|α| ≤ order`.
///
/// Coefficients are Taylor coefficients, i.e. `D^α f(center) / α!`.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    num_vars: usize,
    order: u32,
    coeffs: BTreeMap<Monomial, Complex64>,
}

impl Jet {
    pub fn zero(num_vars: usize, order: u32) -> Self {
        Jet {
            num_vars,
            order,
            coeffs: BTreeMap::new(),
        }
    }

    /// Truncates the coefficients of `p` (taken at the origin) to `order`.
    pub fn from_poly(p: &Poly, order: u32) -> Self {
        Jet {
            num_vars: p.num_vars(),
            order,
            coeffs: p
                .terms()
                .take_while(|(m, _)| m.degree() <= order)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Truncation degree `K`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Complex64 {
        self.coeffs
            .get(&Monomial::new(exponents.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    /// Nonzero coefficients in graded lexicographic order.
    pub fn coefficients(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.coeffs.iter()
    }

    /// First coefficient (in graded order) whose modulus exceeds `tol`.
    pub fn lowest_nonvanishing(&self, tol: f64) -> Option<(&Monomial, Complex64)> {
        self.coeffs
            .iter()
            .find(|(_, c)| c.norm() > tol)
            .map(|(m, c)| (m, *c))
    }

    /// The truncated polynomial `Σ_{|α| ≤ K} c_α u^α`.
    pub fn to_poly(&self) -> Poly {
        Poly::from_terms(
            self.num_vars,
            self.coeffs.iter().map(|(m, c)| (m.exponents().to_vec(), *c)),
        )
        .expect("jet monomials match num_vars")
    }

    fn check_compatible(&self, other: &Jet) -> u32 {
        assert_eq!(self.num_vars, other.num_vars, "jets over different variable counts");
        self.order.min(other.order)
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        let order = self.check_compatible(rhs);
        let mut coeffs = BTreeMap::new();
        for (m, c) in self.coeffs.iter().chain(&rhs.coeffs) {
            if m.degree() <= order {
                *coeffs.entry(m.clone()).or_insert(Complex64::default()) += c;
            }
        }
        coeffs.retain(|_, c: &mut Complex64| c.norm() != 0.0);
        Jet {
            num_vars: self.num_vars,
            order,
            coeffs,
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        let neg = Jet {
            num_vars: rhs.num_vars,
            order: rhs.order,
            coeffs: rhs.coeffs.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        };
        self + &neg
    }
}

/// Truncated Cauchy product.
impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let order = self.check_compatible(rhs);
        let mut coeffs = BTreeMap::new();
        for (ma, ca) in &self.coeffs {
            for (mb, cb) in &rhs.coeffs {
                if ma.degree() + mb.degree() <= order {
                    *coeffs.entry(ma.mul(mb)).or_insert(Complex64::default()) += ca * cb;
                }
            }
        }
        coeffs.retain(|_, c: &mut Complex64| c.norm() != 0.0);
        Jet {
            num_vars: self.num_vars,
            order,
            coeffs,
        }
    }
}
