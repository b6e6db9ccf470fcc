use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::{AffineMap, Jet, Monomial};
use crate::error::{Error, Result};

/// Coefficients whose modulus falls below this after arithmetic are dropped.
pub const DROP_TOLERANCE: f64 = 1e-14;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// `x1, x2, …, xn`
pub fn default_variable_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("x{i}")).collect()
}

/// Sparse multivariate polynomial with complex coefficients.
///
/// Terms are stored in graded lexicographic order (lowest degree first);
/// no stored coefficient is exactly zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    num_vars: usize,
    terms: BTreeMap<Monomial, Complex64>,
}

impl Poly {
    pub fn zero(num_vars: usize) -> Self {
        Poly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: Complex64) -> Self {
        let mut p = Poly::zero(num_vars);
        if c != ZERO {
            p.terms.insert(Monomial::one(num_vars), c);
        }
        p
    }

    /// The coordinate function `x_{index+1}`.
    ///
    /// # Panics
    ///
    /// If `index >= num_vars`.
    pub fn var(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars, "variable index out of range");
        let mut p = Poly::zero(num_vars);
        p.terms.insert(Monomial::var(num_vars, index), ONE);
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, merging
    /// duplicates and dropping exact zeros.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, Complex64)>,
    {
        let mut p = Poly::zero(num_vars);
        for (exps, c) in terms {
            if exps.len() != num_vars {
                return Err(Error::dim(num_vars, exps.len()));
            }
            *p.terms.entry(Monomial::new(exps)).or_insert(ZERO) += c;
        }
        p.terms.retain(|_, c| *c != ZERO);
        Ok(p)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Terms in graded lexicographic order, lowest degree first.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Complex64 {
        self.terms
            .get(&Monomial::new(exponents.to_vec()))
            .copied()
            .unwrap_or(ZERO)
    }

    /// Total degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// Lowest total degree among the terms, `None` for the zero polynomial.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().next().map(Monomial::degree)
    }

    pub fn is_affine(&self) -> bool {
        self.degree().map_or(true, |d| d <= 1)
    }

    pub fn prune(&self, tol: f64) -> Poly {
        Poly {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(_, c)| c.norm() >= tol && **c != ZERO)
                .map(|(m, c)| (m.clone(), *c))
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect();
        Poly {
            num_vars: self.num_vars,
            terms,
        }
        .prune(DROP_TOLERANCE)
    }

    pub fn pow(&self, mut k: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::constant(self.num_vars, ONE);
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Evaluates at `point` using per-variable power tables.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.num_vars {
            return Err(Error::dim(self.num_vars, point.len()));
        }
        Ok(self.eval_unchecked(point))
    }

    pub(crate) fn eval_unchecked(&self, point: &[Complex64]) -> Complex64 {
        if self.terms.is_empty() {
            return ZERO;
        }
        let mut max_exp = vec![0u32; self.num_vars];
        for m in self.terms.keys() {
            for (mx, &e) in max_exp.iter_mut().zip(m.exponents()) {
                *mx = (*mx).max(e);
            }
        }
        let powers: Vec<Vec<Complex64>> = point
            .iter()
            .zip(&max_exp)
            .map(|(&x, &k)| {
                let mut row = Vec::with_capacity(k as usize + 1);
                let mut acc = ONE;
                row.push(acc);
                for _ in 0..k {
                    acc *= x;
                    row.push(acc);
                }
                row
            })
            .collect();
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exponents()
                    .iter()
                    .enumerate()
                    .fold(*c, |acc, (j, &e)| acc * powers[j][e as usize])
            })
            .sum()
    }

    pub fn partial_derivative(&self, var_index: usize) -> Result<Poly> {
        if var_index >= self.num_vars {
            return Err(Error::IndexOutOfRange {
                index: var_index,
                len: self.num_vars,
            });
        }
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponents()[var_index];
            if e == 0 {
                continue;
            }
            let mut exps = m.exponents().to_vec();
            exps[var_index] -= 1;
            terms.insert(Monomial::new(exps), c * f64::from(e));
        }
        Ok(Poly {
            num_vars: self.num_vars,
            terms,
        })
    }

    /// Exact substitution `q(t) = p(a(t))`, dropping debris below
    /// [`DROP_TOLERANCE`].
    pub fn compose_affine(&self, a: &AffineMap) -> Result<Poly> {
        self.compose_affine_with(a, DROP_TOLERANCE)
    }

    pub fn compose_affine_with(&self, a: &AffineMap, drop_tol: f64) -> Result<Poly> {
        if a.codomain_dim() != self.num_vars {
            return Err(Error::dim(self.num_vars, a.codomain_dim()));
        }
        let n = a.domain_dim();
        let images: Vec<Poly> = a
            .linear_part()
            .iter()
            .zip(a.translation_part())
            .map(|(row, b)| {
                let mut terms: BTreeMap<Monomial, Complex64> = BTreeMap::new();
                if *b != ZERO {
                    terms.insert(Monomial::one(n), *b);
                }
                for (k, coef) in row.iter().enumerate() {
                    if *coef != ZERO {
                        terms.insert(Monomial::var(n, k), *coef);
                    }
                }
                Poly { num_vars: n, terms }
            })
            .collect();
        // powers[j][k] = images[j]^k, filled on demand
        let mut powers: Vec<Vec<Poly>> = images
            .iter()
            .map(|_| vec![Poly::constant(n, ONE)])
            .collect();
        let mut acc: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut prod = Poly::constant(n, *c);
            for (j, &e) in m.exponents().iter().enumerate() {
                while powers[j].len() <= e as usize {
                    let next = raw_mul(powers[j].last().unwrap(), &images[j]);
                    powers[j].push(next);
                }
                if e > 0 {
                    prod = raw_mul(&prod, &powers[j][e as usize]);
                }
            }
            for (pm, pc) in prod.terms {
                *acc.entry(pm).or_insert(ZERO) += pc;
            }
        }
        Ok(Poly {
            num_vars: n,
            terms: acc,
        }
        .prune(drop_tol))
    }

    /// Coefficients of `p(center + u)` in `u`, truncated to total degree `order`.
    pub fn taylor_jet(&self, center: &[Complex64], order: u32) -> Result<Jet> {
        if center.len() != self.num_vars {
            return Err(Error::dim(self.num_vars, center.len()));
        }
        let shifted = self.compose_affine(&AffineMap::translation(center.to_vec()))?;
        Ok(Jet::from_poly(&shifted, order))
    }

    /// The lowest-degree homogeneous part `F` and its degree `r`.
    pub fn leading_form(&self) -> Result<(u32, Poly)> {
        let r = self.order().ok_or(Error::ZeroPolynomial)?;
        let terms = self
            .terms
            .iter()
            .take_while(|(m, _)| m.degree() == r)
            .map(|(m, c)| (m.clone(), *c))
            .collect();
        Ok((
            r,
            Poly {
                num_vars: self.num_vars,
                terms,
            },
        ))
    }

    /// Formats with the given variable names in the parser's grammar;
    /// `parse_poly(p.to_expr(names), names)` reproduces `p` exactly.
    pub fn to_expr(&self, names: &[String]) -> String {
        assert_eq!(names.len(), self.num_vars, "one name per variable");
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            // Flip the sign so the printed coefficient has a positive real
            // part (or zero real part and positive imaginary part).
            let negative = c.re < 0.0 || (c.re == 0.0 && c.im < 0.0);
            let c = if negative { -c } else { *c };
            match (i, negative) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let mono: Vec<String> = m
                .exponents()
                .iter()
                .zip(names)
                .filter(|(e, _)| **e > 0)
                .map(|(&e, name)| {
                    if e == 1 {
                        name.clone()
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            let coef = format_coefficient(c);
            if mono.is_empty() {
                out.push_str(&coef);
            } else if c == ONE {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&coef);
                out.push('*');
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

/// Positive-real-part coefficient in the grammar's number syntax.
fn format_coefficient(c: Complex64) -> String {
    let re = c.re.abs();
    if c.im == 0.0 {
        format!("{re:?}")
    } else if c.re == 0.0 {
        // parenthesized so a preceding real constant cannot absorb it
        format!("({:?}i)", c.im)
    } else if c.im < 0.0 {
        format!("({re:?}-{:?}i)", -c.im)
    } else {
        format!("({re:?}+{:?}i)", c.im)
    }
}

fn raw_mul(a: &Poly, b: &Poly) -> Poly {
    let mut terms: BTreeMap<Monomial, Complex64> = BTreeMap::new();
    for (ma, ca) in &a.terms {
        for (mb, cb) in &b.terms {
            *terms.entry(ma.mul(mb)).or_insert(ZERO) += ca * cb;
        }
    }
    terms.retain(|_, c| *c != ZERO);
    Poly {
        num_vars: a.num_vars,
        terms,
    }
}

fn combine(a: &Poly, b: &Poly, sign: f64) -> Poly {
    assert_eq!(a.num_vars, b.num_vars, "polynomials over different variable counts");
    let mut terms = a.terms.clone();
    for (m, c) in &b.terms {
        *terms.entry(m.clone()).or_insert(ZERO) += c * sign;
    }
    Poly {
        num_vars: a.num_vars,
        terms,
    }
    .prune(DROP_TOLERANCE)
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        combine(self, rhs, 1.0)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        combine(self, rhs, -1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.num_vars, rhs.num_vars, "polynomials over different variable counts");
        raw_mul(self, rhs).prune(DROP_TOLERANCE)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $f:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $f(self, rhs: Poly) -> Poly {
                (&self).$f(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_expr(&default_variable_names(self.num_vars)))
    }
}
