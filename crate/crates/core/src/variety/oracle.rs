//! Distance oracles `ρ(x, X)`.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::system::PolySystem;
use super::{Form, VarietySpec};
use crate::cvec::{self, CVec};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Finite,
    Linear,
    GaussNewton,
    Penalty,
    BruteForce,
}

impl OracleMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleMethod::Finite => "finite",
            OracleMethod::Linear => "linear",
            OracleMethod::GaussNewton => "gauss_newton",
            OracleMethod::Penalty => "penalty",
            OracleMethod::BruteForce => "brute_force",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistanceOptions {
    /// Number of local solves (projection start, base point, perturbations).
    pub starts: usize,
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub penalty_weights: Vec<f64>,
    /// Largest equation residual accepted for an implicit foot point.
    pub feasibility_tolerance: f64,
    pub seed: u64,
}

impl Default for DistanceOptions {
    fn default() -> Self {
        DistanceOptions {
            starts: 16,
            max_iterations: 200,
            gradient_tolerance: 1e-10,
            penalty_weights: vec![1e2, 1e4, 1e6, 1e8, 1e10],
            feasibility_tolerance: 1e-9,
            seed: 0,
        }
    }
}

/// Gradient norm below which a smooth-form result counts as stationary.
pub const STATIONARITY_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub distance: f64,
    pub foot_point: CVec,
    pub method: OracleMethod,
    /// Exact for finite and linear sets; an upper bound realized by a point
    /// of the set for brute force.
    pub certified: bool,
    pub converged: bool,
    /// First-order optimality residual at the foot point (0 for exact
    /// methods).
    pub stationarity: f64,
}

impl DistanceResult {
    fn exact(x: &[Complex64], foot: CVec, method: OracleMethod) -> Self {
        DistanceResult {
            distance: cvec::distance(x, &foot),
            foot_point: foot,
            method,
            certified: true,
            converged: true,
            stationarity: 0.0,
        }
    }
}

pub fn distance(spec: &VarietySpec, x: &[Complex64], opts: &DistanceOptions) -> Result<DistanceResult> {
    if x.len() != spec.ambient_dim() {
        return Err(Error::dim(spec.ambient_dim(), x.len()));
    }
    match spec.form() {
        Form::Finite { points } => Ok(nearest_point(points, x)),
        Form::Parametric { .. } | Form::Graph { .. } => {
            if spec.is_affine() {
                if let Form::Graph { .. } = spec.form() {
                    let eqs = spec.implicit_equations().expect("graph has equations");
                    return linear_projection(&eqs, x);
                }
                return affine_image_projection(spec, x);
            }
            Ok(gauss_newton_multistart(&ParamMap::new(spec), spec.base_point(), x, opts))
        }
        Form::Implicit { equations } => implicit_distance(spec, equations, x, opts),
        Form::Intersection { parts } => {
            let finite: Vec<&VarietySpec> = parts
                .iter()
                .filter(|p| matches!(p.form(), Form::Finite { .. }))
                .collect();
            if let Some(first) = finite.first() {
                let Form::Finite { points } = first.form() else { unreachable!() };
                let kept: Vec<CVec> = points
                    .iter()
                    .filter(|p| parts.iter().all(|q| super::membership(q, p, 1e-9)))
                    .cloned()
                    .collect();
                return Ok(nearest_point(&kept, x));
            }
            match spec.implicit_equations() {
                Some(eqs) => implicit_distance(spec, &eqs, x, opts),
                None => Err(Error::Unsupported(
                    "distance to an intersection involving a parametric set".into(),
                )),
            }
        }
    }
}

fn nearest_point(points: &[CVec], x: &[Complex64]) -> DistanceResult {
    let best = points
        .iter()
        .min_by(|a, b| cvec::distance(a, x).total_cmp(&cvec::distance(b, x)));
    match best {
        Some(p) => DistanceResult::exact(x, p.clone(), OracleMethod::Finite),
        // the empty set is infinitely far away
        None => DistanceResult {
            distance: f64::INFINITY,
            foot_point: x.to_vec(),
            method: OracleMethod::Finite,
            certified: true,
            converged: true,
            stationarity: 0.0,
        },
    }
}

fn implicit_distance(
    spec: &VarietySpec,
    equations: &[crate::algebra::Poly],
    x: &[Complex64],
    opts: &DistanceOptions,
) -> Result<DistanceResult> {
    if equations.iter().all(|e| e.is_affine()) {
        return linear_projection(equations, x);
    }
    Ok(penalty_multistart(
        &PolySystem::new(spec.ambient_dim(), equations),
        spec.base_point(),
        x,
        opts,
    ))
}

/// Orthogonal projection onto `{y : A y + c = 0}`.
fn linear_projection(equations: &[crate::algebra::Poly], x: &[Complex64]) -> Result<DistanceResult> {
    let sys = PolySystem::new(x.len(), equations);
    if sys.len() == 0 {
        return Ok(DistanceResult::exact(x, x.to_vec(), OracleMethod::Linear));
    }
    let a = sys.jacobian(x);
    let r = sys.eval(x);
    let delta = linalg::lstsq(&a, &r);
    let foot = cvec::sub(x, &delta);
    if sys.residual(&foot) > 1e-8 * (1.0 + cvec::norm(x)) {
        return Err(Error::Degenerate("inconsistent linear equations".into()));
    }
    Ok(DistanceResult::exact(x, foot, OracleMethod::Linear))
}

/// Projection onto the image of an affine parametrization.
fn affine_image_projection(spec: &VarietySpec, x: &[Complex64]) -> Result<DistanceResult> {
    let map = ParamMap::new(spec);
    let t0 = cvec::zeros(map.param_dim);
    let base = map.point(&t0);
    let a = map.jacobian(&t0);
    let t = linalg::lstsq(&a, &cvec::sub(x, &base));
    Ok(DistanceResult::exact(x, map.point(&t), OracleMethod::Linear))
}

/// `t ↦ φ(t)` for graph and parametric forms.
pub(crate) struct ParamMap {
    param_dim: usize,
    sys: PolySystem,
    // graph form: (x0, p) with φ(t) = x0 + (t, f(t))
    graph_base: Option<CVec>,
}

impl ParamMap {
    pub(crate) fn new(spec: &VarietySpec) -> Self {
        match spec.form() {
            Form::Graph { param_dim, components } => ParamMap {
                param_dim: *param_dim,
                sys: PolySystem::new(*param_dim, components),
                graph_base: Some(spec.base_point().to_vec()),
            },
            Form::Parametric { param_dim, map } => ParamMap {
                param_dim: *param_dim,
                sys: PolySystem::new(*param_dim, map),
                graph_base: None,
            },
            _ => panic!("ParamMap needs a graph or parametric form"),
        }
    }

    pub(crate) fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub(crate) fn point(&self, t: &[Complex64]) -> CVec {
        let values = self.sys.eval(t);
        match &self.graph_base {
            Some(x0) => t
                .iter()
                .chain(&values)
                .zip(x0)
                .map(|(v, b)| v + b)
                .collect(),
            None => values,
        }
    }

    pub(crate) fn jacobian(&self, t: &[Complex64]) -> CMat {
        let d = self.sys.jacobian(t);
        match &self.graph_base {
            Some(x0) => {
                let p = self.param_dim;
                CMat::from_fn(x0.len(), p, |i, j| {
                    if i < p {
                        Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
                    } else {
                        d[(i - p, j)]
                    }
                })
            }
            None => d,
        }
    }
}

struct LocalSolution {
    foot: CVec,
    distance: f64,
    gradient: f64,
}

/// Damped Gauss–Newton on `‖φ(t) − x‖²`. The map is holomorphic, so the
/// complex least-squares step is the realified Gauss–Newton step.
fn gauss_newton(map: &ParamMap, x: &[Complex64], mut t: CVec, opts: &DistanceOptions) -> LocalSolution {
    let mut r = cvec::sub(&map.point(&t), x);
    let mut f = cvec::norm_sqr(&r);
    let mut gradient = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        let jac = map.jacobian(&t);
        gradient = cvec::norm(&linalg::adjoint_mul(&jac, &r));
        if gradient <= opts.gradient_tolerance || f == 0.0 {
            break;
        }
        let neg_r: CVec = r.iter().map(|v| -v).collect();
        let delta = linalg::lstsq(&jac, &neg_r);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let cand = cvec::axpy(&t, Complex64::new(step, 0.0), &delta);
            let rc = cvec::sub(&map.point(&cand), x);
            let fc = cvec::norm_sqr(&rc);
            if fc < f {
                accepted = Some((cand, rc, fc));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, rc, fc)) = accepted else { break };
        let moved = step * cvec::norm(&delta);
        t = cand;
        r = rc;
        f = fc;
        if moved <= 1e-15 * (1.0 + cvec::norm(&t)) {
            gradient = cvec::norm(&linalg::adjoint_mul(&map.jacobian(&t), &r));
            break;
        }
    }
    if gradient.is_infinite() {
        gradient = cvec::norm(&linalg::adjoint_mul(&map.jacobian(&t), &r));
    }
    let foot = map.point(&t);
    LocalSolution {
        distance: cvec::distance(&foot, x),
        foot,
        gradient,
    }
}

/// Scale of the random perturbations added to the projection start.
fn perturbation_scale(x: &[Complex64], x0: &[Complex64]) -> f64 {
    0.5 * cvec::distance(x, x0).max(1e-300)
}

fn gauss_newton_multistart(
    map: &ParamMap,
    x0: &[Complex64],
    x: &[Complex64],
    opts: &DistanceOptions,
) -> DistanceResult {
    let p = map.param_dim();
    let zero = cvec::zeros(p);
    let base_distance = cvec::distance(x, x0);
    if base_distance == 0.0 {
        return DistanceResult {
            distance: 0.0,
            foot_point: x0.to_vec(),
            method: OracleMethod::GaussNewton,
            certified: false,
            converged: true,
            stationarity: 0.0,
        };
    }
    // linearized projection start
    let proj = linalg::lstsq(&map.jacobian(&zero), &cvec::sub(x, &map.point(&zero)));
    let sigma = perturbation_scale(x, x0);
    let mut rng = seed::rng(opts.seed);
    let mut starts = vec![proj.clone(), zero];
    while starts.len() < opts.starts.max(1) {
        let g = seed::complex_gaussian_vec(&mut rng, p);
        starts.push(cvec::axpy(&proj, Complex64::new(sigma, 0.0), &g));
    }
    starts.truncate(opts.starts.max(1));
    let mut best: Option<LocalSolution> = None;
    for s in starts {
        let sol = gauss_newton(map, x, s, opts);
        if best.as_ref().map_or(true, |b| sol.distance < b.distance) {
            best = Some(sol);
        }
    }
    let best = best.expect("at least one start");
    DistanceResult {
        distance: best.distance,
        foot_point: best.foot,
        method: OracleMethod::GaussNewton,
        certified: false,
        converged: best.gradient <= STATIONARITY_TOLERANCE,
        stationarity: best.gradient,
    }
}

/// Minimum-norm Newton projection `y ← y − J⁺ F(y)` onto `{F = 0}`.
pub(crate) fn newton_project(sys: &PolySystem, mut y: CVec, max_iterations: usize) -> (CVec, f64) {
    let mut fy = sys.eval(&y);
    let mut res = cvec::norm(&fy);
    for _ in 0..max_iterations {
        if res == 0.0 {
            break;
        }
        let delta = linalg::lstsq(&sys.jacobian(&y), &fy);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let cand = cvec::axpy(&y, Complex64::new(-step, 0.0), &delta);
            let fc = sys.eval(&cand);
            let rc = cvec::norm(&fc);
            if rc < res {
                accepted = Some((cand, fc, rc));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, fc, rc)) = accepted else { break };
        let moved = step * cvec::norm(&delta);
        y = cand;
        fy = fc;
        res = rc;
        if moved <= 1e-15 * (1.0 + cvec::norm(&y)) {
            break;
        }
    }
    let residual = sys.residual(&y);
    (y, residual)
}

/// One damped Gauss–Newton solve of `min ‖y − x‖² + μ ‖F(y)‖²`.
fn penalty_stage(sys: &PolySystem, x: &[Complex64], mut y: CVec, mu: f64, opts: &DistanceOptions) -> CVec {
    let m = sys.num_vars();
    let k = sys.len();
    let s = mu.sqrt();
    let stacked = |y: &[Complex64]| -> CVec {
        let mut r = cvec::sub(y, x);
        r.extend(sys.eval(y).into_iter().map(|v| v * s));
        r
    };
    let mut r = stacked(&y);
    let mut f = cvec::norm_sqr(&r);
    for _ in 0..opts.max_iterations {
        let d = sys.jacobian(&y);
        let jac = CMat::from_fn(m + k, m, |i, j| {
            if i < m {
                Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)
            } else {
                d[(i - m, j)] * s
            }
        });
        let grad = cvec::norm(&linalg::adjoint_mul(&jac, &r));
        if grad <= opts.gradient_tolerance {
            break;
        }
        let neg_r: CVec = r.iter().map(|v| -v).collect();
        let delta = linalg::lstsq(&jac, &neg_r);
        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..50 {
            let cand = cvec::axpy(&y, Complex64::new(step, 0.0), &delta);
            let rc = stacked(&cand);
            let fc = cvec::norm_sqr(&rc);
            if fc < f {
                accepted = Some((cand, rc, fc));
                break;
            }
            step *= 0.5;
        }
        let Some((cand, rc, fc)) = accepted else { break };
        let moved = step * cvec::norm(&delta);
        y = cand;
        r = rc;
        f = fc;
        if moved <= 1e-14 * (1.0 + cvec::norm(&y)) {
            break;
        }
    }
    y
}

/// Remaining continuation stages after the first, then a Newton
/// projection onto the set.
fn penalty_finish(sys: &PolySystem, x: &[Complex64], mut y: CVec, opts: &DistanceOptions) -> CVec {
    for &mu in opts.penalty_weights.iter().skip(1) {
        y = penalty_stage(sys, x, y, mu, opts);
    }
    newton_project(sys, y, opts.max_iterations).0
}

/// Norm of the component of `x − y` outside the row space of `DF(y)^H`.
fn kkt_residual(sys: &PolySystem, x: &[Complex64], y: &[Complex64]) -> f64 {
    let d = sys.jacobian(y);
    let g = cvec::sub(x, y);
    let dh = d.adjoint();
    let lambda = linalg::lstsq(&dh, &g);
    let fitted: CVec = (0..g.len())
        .map(|i| (0..lambda.len()).map(|j| dh[(i, j)] * lambda[j]).sum())
        .collect();
    cvec::distance(&g, &fitted)
}

fn penalty_multistart(
    sys: &PolySystem,
    x0: &[Complex64],
    x: &[Complex64],
    opts: &DistanceOptions,
) -> DistanceResult {
    let base = DistanceResult {
        distance: cvec::distance(x, x0),
        foot_point: x0.to_vec(),
        method: OracleMethod::Penalty,
        certified: false,
        converged: true,
        stationarity: 0.0,
    };
    if sys.residual(x) == 0.0 {
        return DistanceResult {
            distance: 0.0,
            foot_point: x.to_vec(),
            ..base
        };
    }
    let m = x.len();
    let sigma = perturbation_scale(x, x0);
    let mut rng = seed::rng(opts.seed);
    // the base point is a feasible candidate on its own, so it takes one slot
    let solves = opts.starts.max(2) - 1;
    let mut starts = vec![x.to_vec()];
    while starts.len() < solves {
        let g = seed::complex_gaussian_vec(&mut rng, m);
        let scale = sigma * rng.random_range(0.1..1.0);
        starts.push(cvec::axpy(x, Complex64::new(scale, 0.0), &g));
    }
    let mut best = base;
    best.stationarity = kkt_residual(sys, x, x0);
    // Starts whose first (weakest) penalty stage ends where an earlier one
    // did would retrace the same continuation path, so they are skipped.
    let mut first_stage_ends: Vec<CVec> = Vec::new();
    let merge_radius = 1e-6 * (1.0 + cvec::norm(x));
    for s in starts {
        let mut y = s;
        if let Some(&mu) = opts.penalty_weights.first() {
            y = penalty_stage(sys, x, y, mu, opts);
            if first_stage_ends.iter().any(|e| cvec::distance(e, &y) < merge_radius) {
                continue;
            }
            first_stage_ends.push(y.clone());
        }
        let y = penalty_finish(sys, x, y, opts);
        if sys.residual(&y) > opts.feasibility_tolerance {
            continue;
        }
        let d = cvec::distance(x, &y);
        if d < best.distance {
            best.distance = d;
            best.stationarity = kkt_residual(sys, x, &y);
            best.foot_point = y;
        }
    }
    best
}

/// Reference oracle: deterministic Halton sampling of the parameter ball
/// of radius `radius` in `R^{2p}`, then compass search from the best sample.
pub fn distance_bruteforce(
    spec: &VarietySpec,
    x: &[Complex64],
    radius: f64,
    samples: usize,
) -> Result<DistanceResult> {
    if x.len() != spec.ambient_dim() {
        return Err(Error::dim(spec.ambient_dim(), x.len()));
    }
    match spec.form() {
        Form::Finite { points } => Ok(nearest_point(points, x)),
        Form::Graph { .. } | Form::Parametric { .. } => {
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(Error::invalid("search radius must be positive"));
            }
            let map = ParamMap::new(spec);
            Ok(halton_search(&map, x, radius, samples))
        }
        _ => Err(Error::Unsupported(format!(
            "brute-force distance to a set in {} form",
            spec.kind()
        ))),
    }
}

const PRIMES: [u32; 24] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut acc = 0.0;
    while i > 0 {
        acc += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    acc
}

fn params_from_real(v: &[f64]) -> CVec {
    v.chunks(2).map(|c| Complex64::new(c[0], c[1])).collect()
}

fn halton_search(map: &ParamMap, x: &[Complex64], radius: f64, samples: usize) -> DistanceResult {
    let dim = 2 * map.param_dim();
    assert!(dim <= PRIMES.len(), "parameter dimension too large for the Halton sequence");
    let objective = |v: &[f64]| cvec::distance(&map.point(&params_from_real(v)), x);
    let mut best = vec![0.0; dim];
    let mut best_value = objective(&best);
    let mut accepted = 0usize;
    let mut index = 1u64;
    while accepted < samples {
        let v: Vec<f64> = (0..dim)
            .map(|k| radius * (2.0 * radical_inverse(index, PRIMES[k]) - 1.0))
            .collect();
        index += 1;
        if v.iter().map(|a| a * a).sum::<f64>() > radius * radius {
            continue;
        }
        accepted += 1;
        let value = objective(&v);
        if value < best_value {
            best_value = value;
            best = v;
        }
    }
    // compass search, starting at the sample spacing
    let mut h = 2.0 * radius / (samples.max(1) as f64).powf(1.0 / dim as f64);
    let floor = 1e-13 * (1.0 + radius);
    while h > floor {
        let mut improved = false;
        for k in 0..dim {
            for sign in [1.0, -1.0] {
                let mut cand = best.clone();
                cand[k] += sign * h;
                let value = objective(&cand);
                if value < best_value {
                    best_value = value;
                    best = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    let t = params_from_real(&best);
    let foot = map.point(&t);
    DistanceResult {
        distance: cvec::distance(&foot, x),
        foot_point: foot,
        method: OracleMethod::BruteForce,
        certified: true,
        converged: true,
        stationarity: 0.0,
    }
}
