//! Hyperplanes through a base point and the angle metric between them.
//!
//! A hyperplane `H ⊂ C^m` through `x0` is stored by a unit normal `v`, so
//! `x ∈ H` iff `⟨x − x0, v⟩ = 0`. The distance between two hyperplanes
//! through the same point is the angle `arccos |⟨v, w⟩|` between their unit
//! normals, a number in `[0, π/2]`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::AffineMap;
use crate::cvec::{self, CVec};
use crate::error::{Error, Result};
use crate::seed;

/// Absolute tolerance used when comparing angles.
pub const ANGLE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HyperplaneRecord", into = "HyperplaneRecord")]
pub struct Hyperplane {
    base_point: CVec,
    normal: CVec,
}

#[derive(Serialize, Deserialize)]
struct HyperplaneRecord {
    ambient_dim: usize,
    base_point: Vec<[f64; 2]>,
    normal: Vec<[f64; 2]>,
}

impl TryFrom<HyperplaneRecord> for Hyperplane {
    type Error = Error;
    fn try_from(r: HyperplaneRecord) -> Result<Self> {
        if r.base_point.len() != r.ambient_dim {
            return Err(Error::dim(r.ambient_dim, r.base_point.len()));
        }
        Hyperplane::new(cvec::from_pairs(&r.base_point), cvec::from_pairs(&r.normal))
    }
}

impl From<Hyperplane> for HyperplaneRecord {
    fn from(h: Hyperplane) -> Self {
        HyperplaneRecord {
            ambient_dim: h.ambient_dim(),
            base_point: cvec::to_pairs(&h.base_point),
            normal: cvec::to_pairs(&h.normal),
        }
    }
}

impl Hyperplane {
    /// The normal is normalized on construction.
    pub fn new(base_point: CVec, normal: CVec) -> Result<Self> {
        if base_point.len() < 2 {
            return Err(Error::invalid("hyperplanes need ambient dimension ≥ 2"));
        }
        if normal.len() != base_point.len() {
            return Err(Error::dim(base_point.len(), normal.len()));
        }
        let normal = cvec::normalized(&normal)
            .ok_or_else(|| Error::invalid("hyperplane normal must be nonzero and finite"))?;
        Ok(Hyperplane { base_point, normal })
    }

    /// `{x : x_{index+1} = base_point_{index+1}}`
    pub fn coordinate(base_point: CVec, index: usize) -> Result<Self> {
        let m = base_point.len();
        if index >= m {
            return Err(Error::IndexOutOfRange { index, len: m });
        }
        Hyperplane::new(base_point, cvec::unit(m, index))
    }

    pub fn ambient_dim(&self) -> usize {
        self.base_point.len()
    }

    pub fn base_point(&self) -> &[Complex64] {
        &self.base_point
    }

    pub fn normal(&self) -> &[Complex64] {
        &self.normal
    }

    /// `⟨x − x0, v⟩`, the signed offset of `x` from the hyperplane.
    pub fn offset(&self, x: &[Complex64]) -> Complex64 {
        self.normal
            .iter()
            .zip(x.iter().zip(&self.base_point))
            .map(|(v, (xi, bi))| (xi - bi) * v.conj())
            .sum()
    }

    pub fn contains(&self, x: &[Complex64], tol: f64) -> bool {
        self.offset(x).norm() <= tol
    }

    /// Orthogonal projection of `x` onto the hyperplane.
    pub fn project(&self, x: &[Complex64]) -> CVec {
        cvec::axpy(x, -self.offset(x), &self.normal)
    }

    fn check_compatible(&self, other: &Hyperplane) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() {
            return Err(Error::dim(self.ambient_dim(), other.ambient_dim()));
        }
        if cvec::distance(&self.base_point, &other.base_point) > 1e-12 {
            return Err(Error::BasePointMismatch);
        }
        Ok(())
    }
}

/// `arccos |⟨v, w⟩|` for unit normals `v`, `w`, clamped to `[0, π/2]`.
pub fn angle(h: &Hyperplane, k: &Hyperplane) -> Result<f64> {
    h.check_compatible(k)?;
    let cos = cvec::hdot(&h.normal, &k.normal).norm().clamp(0.0, 1.0);
    // acos loses precision near 1; the complementary form does not.
    let sin = (1.0 - cos * cos).max(0.0).sqrt();
    Ok(sin.atan2(cos).clamp(0.0, std::f64::consts::FRAC_PI_2))
}

/// A Hermitian-orthonormal basis of a hyperplane's direction space.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    hyperplane: Hyperplane,
    basis: Vec<CVec>,
}

impl Frame {
    pub fn hyperplane(&self) -> &Hyperplane {
        &self.hyperplane
    }

    pub fn basis(&self) -> &[CVec] {
        &self.basis
    }

    /// Frame coordinates `t_i = ⟨x − x0, b_i⟩` of (the projection of) `x`.
    pub fn coordinates(&self, x: &[Complex64]) -> CVec {
        let d = cvec::sub(x, self.hyperplane.base_point());
        self.basis.iter().map(|b| cvec::hdot(&d, b)).collect()
    }

    /// `x0 + Σ t_i b_i`
    pub fn point(&self, t: &[Complex64]) -> CVec {
        let mut x = self.hyperplane.base_point.clone();
        for (ti, b) in t.iter().zip(&self.basis) {
            for (xj, bj) in x.iter_mut().zip(b) {
                *xj += ti * bj;
            }
        }
        x
    }
}

fn gram_schmidt_step(v: &mut CVec, against: &[CVec]) {
    for u in against {
        let p = cvec::hdot(v, u);
        for (vi, ui) in v.iter_mut().zip(u) {
            *vi -= p * ui;
        }
    }
}

/// Orthonormal frame of `h`.
///
/// Seed `0` gives the canonical frame: Gram–Schmidt of the standard basis
/// vectors, skipping the one most aligned with the normal. For `x_m = 0`
/// this is `e_1, …, e_{m−1}`. Any other seed rotates the canonical frame by
/// a seeded random unitary of `C^{m−1}`.
pub fn orthonormal_frame(h: &Hyperplane, seed: u64) -> Frame {
    let m = h.ambient_dim();
    let skip = (0..m)
        .max_by(|&a, &b| h.normal[a].norm().total_cmp(&h.normal[b].norm()))
        .unwrap();
    let mut done: Vec<CVec> = vec![h.normal.clone()];
    for j in (0..m).filter(|&j| j != skip) {
        let mut v = cvec::unit(m, j);
        // twice for numerical orthogonality
        gram_schmidt_step(&mut v, &done);
        gram_schmidt_step(&mut v, &done);
        done.push(cvec::normalized(&v).expect("complement vectors are independent"));
    }
    let mut basis: Vec<CVec> = done.split_off(1);
    if seed != 0 {
        let u = random_unitary(m - 1, seed);
        basis = (0..m - 1)
            .map(|i| {
                let mut v = cvec::zeros(m);
                for (j, b) in basis.iter().enumerate() {
                    for (vk, bk) in v.iter_mut().zip(b) {
                        *vk += u[j][i] * bk;
                    }
                }
                v
            })
            .collect();
    }
    Frame {
        hyperplane: h.clone(),
        basis,
    }
}

/// Columns of a seeded random unitary, as `u[row][col]`.
fn random_unitary(n: usize, seed: u64) -> Vec<CVec> {
    let mut rng = seed::rng(seed::derive(seed, &[0x756e_6974]));
    let mut cols: Vec<CVec> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = seed::complex_gaussian_vec(&mut rng, n);
        gram_schmidt_step(&mut v, &cols);
        gram_schmidt_step(&mut v, &cols);
        if cvec::norm(&v) > 1e-6 {
            cols.push(cvec::normalized(&v).unwrap());
        }
    }
    (0..n)
        .map(|r| (0..n).map(|c| cols[c][r]).collect())
        .collect()
}

/// The isometric parametrization `t ↦ x0 + Σ t_i b_i` of the frame's
/// hyperplane by `C^{m−1}`.
pub fn parametrization(frame: &Frame) -> AffineMap {
    let m = frame.hyperplane.ambient_dim();
    let linear = (0..m)
        .map(|r| frame.basis.iter().map(|b| b[r]).collect())
        .collect();
    AffineMap::new(linear, frame.hyperplane.base_point.clone())
        .expect("frame has m-1 basis vectors of length m")
}

/// A hyperplane through `x0` with normal drawn from the unitarily invariant
/// distribution on the unit sphere of `C^m`.
pub fn sample_generic_hyperplane(m: usize, x0: &[Complex64], seed: u64) -> Result<Hyperplane> {
    if m < 2 {
        return Err(Error::invalid("hyperplanes need ambient dimension ≥ 2"));
    }
    if x0.len() != m {
        return Err(Error::dim(m, x0.len()));
    }
    let mut rng = seed::rng(seed::derive(seed, &[0x6879_7065]));
    Hyperplane::new(x0.to_vec(), seed::unit_sphere(&mut rng, m))
}

/// The hyperplane through `x0` and `y` closest in angle to `h0`.
///
/// In coordinates with `x0` at the origin, `h0 = {x_m = 0}` and
/// `y = (y_1, 0, …, 0, y_m)`, the minimizer is `x_m = q_1 x_1` with
/// `q_1 = y_m / y_1`, whose normal is `−conj(q_1) e_1 + e_m` and whose angle
/// to `h0` satisfies `cos = 1/√(1 + |q_1|²)`.
///
/// If `y ∈ h0`, returns `h0`. If `y − x0` is orthogonal to `h0` (`y_1 = 0`),
/// every hyperplane through `y` makes angle `π/2` with `h0`; the one whose
/// normal is orthogonal to `y − x0` and to the first standard basis vector not
/// parallel to `y − x0` is returned.
pub fn min_angle_hyperplane_through(y: &[Complex64], h0: &Hyperplane) -> Result<Hyperplane> {
    let m = h0.ambient_dim();
    if y.len() != m {
        return Err(Error::dim(m, y.len()));
    }
    let d = cvec::sub(y, h0.base_point());
    let dn = cvec::norm(&d);
    if dn == 0.0 {
        return Err(Error::invalid("point coincides with the base point"));
    }
    let y_m = cvec::hdot(&d, h0.normal());
    let tangential = cvec::axpy(&d, -y_m, h0.normal());
    let y_1 = cvec::norm(&tangential);
    if y_m.norm() <= 1e-15 * dn {
        return Ok(h0.clone());
    }
    if y_1 <= 1e-15 * dn {
        let du = cvec::normalized(&d).unwrap();
        let reference = (0..m)
            .map(|j| cvec::unit(m, j))
            .find(|e| cvec::hdot(e, &du).norm() < 0.9)
            .expect("m ≥ 2 leaves a non-parallel axis");
        let mut n = reference;
        gram_schmidt_step(&mut n, std::slice::from_ref(&du));
        return Hyperplane::new(h0.base_point().to_vec(), n);
    }
    let e1 = cvec::scale(&tangential, Complex64::new(1.0 / y_1, 0.0));
    let q1 = y_m / y_1;
    let normal = cvec::axpy(h0.normal(), -q1.conj(), &e1);
    Hyperplane::new(h0.base_point().to_vec(), normal)
}

/// Outcome of checking the bound `‖y1 − y0‖ ≥ 0.9·tan(a)·‖y0 − x0‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Lemma1Outcome {
    Pass { lhs: f64, rhs: f64 },
    Fail { lhs: f64, rhs: f64, y0: Vec<[f64; 2]>, y1: Vec<[f64; 2]> },
    Skip { reason: String },
}

impl Lemma1Outcome {
    pub fn is_pass(&self) -> bool {
        matches!(self, Lemma1Outcome::Pass { .. })
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Lemma1Outcome::Fail { .. })
    }
}

/// Checks `‖y1 − y0‖ ≥ 0.9·tan(a)·‖y0 − x0‖` for `y0 ∈ h0`.
///
/// Configurations outside the bound's hypotheses are skipped: `y0 ∉ h0`,
/// `y1 = x0`, `‖y0 − y1‖ ≥ ‖y0 − x0‖/10`, or the minimal angle between `h0`
/// and a hyperplane through `y1` below `a`.
pub fn lemma1_bound_check(
    y0: &[Complex64],
    y1: &[Complex64],
    h0: &Hyperplane,
    a: f64,
) -> Result<Lemma1Outcome> {
    let m = h0.ambient_dim();
    if y0.len() != m {
        return Err(Error::dim(m, y0.len()));
    }
    if y1.len() != m {
        return Err(Error::dim(m, y1.len()));
    }
    let skip = |reason: &str| Ok(Lemma1Outcome::Skip { reason: reason.into() });
    let r0 = cvec::distance(y0, h0.base_point());
    if !h0.contains(y0, 1e-10 * r0.max(1.0)) {
        return skip("y0 is not on the hyperplane");
    }
    if cvec::distance(y1, h0.base_point()) == 0.0 {
        return skip("y1 coincides with the base point");
    }
    let lhs = cvec::distance(y1, y0);
    if lhs >= r0 / 10.0 {
        return skip("closeness precondition |y0 - y1| < |y0|/10 fails");
    }
    let h1 = min_angle_hyperplane_through(y1, h0)?;
    if angle(h0, &h1)? < a {
        return skip("minimal angle below the threshold");
    }
    let rhs = 0.9 * a.tan() * r0;
    if lhs >= rhs {
        Ok(Lemma1Outcome::Pass { lhs, rhs })
    } else {
        Ok(Lemma1Outcome::Fail {
            lhs,
            rhs,
            y0: cvec::to_pairs(y0),
            y1: cvec::to_pairs(y1),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn origin(m: usize) -> CVec {
        cvec::zeros(m)
    }

    #[test]
    fn angle_examples() {
        let h0 = Hyperplane::coordinate(origin(2), 1).unwrap();
        // x2 = x1  <=>  normal (-1, 1)
        let h1 = Hyperplane::new(origin(2), vec![c(-1.0), c(1.0)]).unwrap();
        assert!((angle(&h0, &h1).unwrap() - FRAC_PI_4).abs() < 1e-12);
        assert_eq!(angle(&h0, &h0).unwrap(), 0.0);
        let e1 = Hyperplane::coordinate(origin(2), 0).unwrap();
        assert!((angle(&e1, &h0).unwrap() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn angle_rejects_mismatch() {
        let a = Hyperplane::coordinate(origin(2), 0).unwrap();
        let b = Hyperplane::coordinate(origin(3), 0).unwrap();
        assert!(angle(&a, &b).is_err());
        let c1 = Hyperplane::coordinate(vec![c(1.0), c(0.0)], 0).unwrap();
        assert!(matches!(angle(&a, &c1), Err(Error::BasePointMismatch)));
    }

    #[test]
    fn canonical_frames() {
        let h = Hyperplane::coordinate(origin(2), 1).unwrap();
        let f = orthonormal_frame(&h, 0);
        assert_eq!(f.basis(), &[cvec::unit(2, 0)]);
        let h3 = Hyperplane::coordinate(origin(3), 2).unwrap();
        let f3 = orthonormal_frame(&h3, 0);
        assert_eq!(f3.basis(), &[cvec::unit(3, 0), cvec::unit(3, 1)]);
    }

    #[test]
    fn parametrization_of_axis_frame() {
        let h = Hyperplane::coordinate(origin(2), 1).unwrap();
        let map = parametrization(&orthonormal_frame(&h, 0));
        assert_eq!(map.apply(&[c(3.0)]).unwrap(), vec![c(3.0), c(0.0)]);
        let shifted = Hyperplane::coordinate(vec![c(1.0), c(2.0)], 1).unwrap();
        let map = parametrization(&orthonormal_frame(&shifted, 9));
        assert_eq!(map.apply(&[c(0.0)]).unwrap(), vec![c(1.0), c(2.0)]);
    }

    #[test]
    fn generic_hyperplane_is_deterministic() {
        let a = sample_generic_hyperplane(2, &origin(2), 5).unwrap();
        let b = sample_generic_hyperplane(2, &origin(2), 5).unwrap();
        assert_eq!(a, b);
        assert!((cvec::norm(a.normal()) - 1.0).abs() < 1e-12);
        let shifted = sample_generic_hyperplane(2, &[c(1.0), c(0.0)], 5).unwrap();
        assert_eq!(shifted.base_point(), &[c(1.0), c(0.0)]);
        assert!(sample_generic_hyperplane(1, &origin(1), 5).is_err());
    }

    #[test]
    fn min_angle_examples() {
        let h0 = Hyperplane::coordinate(origin(2), 1).unwrap();
        let h1 = min_angle_hyperplane_through(&[c(1.0), c(1.0)], &h0).unwrap();
        assert!(h1.contains(&[c(1.0), c(1.0)], 1e-12));
        assert!((angle(&h0, &h1).unwrap() - FRAC_PI_4).abs() < 1e-12);

        let same = min_angle_hyperplane_through(&[c(2.0), c(0.0)], &h0).unwrap();
        assert_eq!(angle(&h0, &same).unwrap(), 0.0);

        let h = min_angle_hyperplane_through(&[c(1.0), c(0.5)], &h0).unwrap();
        let expected = (1.0 / 1.25f64.sqrt()).acos();
        assert!((angle(&h0, &h).unwrap() - expected).abs() < 1e-12);

        assert!(min_angle_hyperplane_through(&[c(0.0), c(0.0)], &h0).is_err());
    }

    #[test]
    fn min_angle_degenerate_branch() {
        // y along the normal: every hyperplane through y is at angle π/2
        let h0 = Hyperplane::coordinate(origin(3), 2).unwrap();
        let y = [c(0.0), c(0.0), c(2.0)];
        let h = min_angle_hyperplane_through(&y, &h0).unwrap();
        assert!(h.contains(&y, 1e-12));
        assert!((angle(&h0, &h).unwrap() - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn lemma1_skips() {
        let h0 = Hyperplane::coordinate(origin(3), 2).unwrap();
        let y0 = [c(1.0), c(0.0), c(0.0)];
        // far from y0: closeness fails
        let far = [c(0.0), c(1.0), c(1.0)];
        assert!(matches!(
            lemma1_bound_check(&y0, &far, &h0, FRAC_PI_4).unwrap(),
            Lemma1Outcome::Skip { .. }
        ));
        // y1 on h0: minimal angle 0 < a
        let on = [c(1.01), c(0.0), c(0.0)];
        assert!(matches!(
            lemma1_bound_check(&y0, &on, &h0, FRAC_PI_4).unwrap(),
            Lemma1Outcome::Skip { .. }
        ));
        // small angle threshold: the bound holds
        let near = [c(1.0), c(0.01), c(0.05)];
        assert!(lemma1_bound_check(&y0, &near, &h0, 0.02).unwrap().is_pass());
    }
}
