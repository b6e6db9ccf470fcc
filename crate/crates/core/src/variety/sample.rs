use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::oracle::{newton_project, ParamMap};
use super::system::PolySystem;
use super::{Form, VarietySpec};
use crate::cvec::{self, CVec};
use crate::error::{Error, Result};
use crate::seed;

/// Residual below which a projected sample is accepted.
pub const SAMPLE_RESIDUAL: f64 = 1e-9;

const ATTEMPTS: usize = 20;

/// `count` points of the set whose distances to `x0` are log-uniform in
/// `[radius · 2^-depth, radius]`. A finite set returns its points.
pub fn sample_on_variety(
    spec: &VarietySpec,
    radius: f64,
    count: usize,
    depth: u32,
    seed: u64,
) -> Result<Vec<CVec>> {
    sample_in_band(spec, radius * 0.5f64.powi(depth as i32), radius, count, seed)
}

/// `count` points of the set at log-uniform distances in `[low, high]`
/// from `x0`. Point `i` depends only on `(seed, i)`.
pub fn sample_in_band(
    spec: &VarietySpec,
    low: f64,
    high: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<CVec>> {
    if !(low > 0.0 && high >= low && high.is_finite()) {
        return Err(Error::invalid(format!("bad sampling band [{low}, {high}]")));
    }
    let sampler = Sampler::new(spec)?;
    if let Sampler::Finite(points) = &sampler {
        return Ok(points.clone());
    }
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = seed::rng(seed::derive(seed, &[i as u64]));
            let rho = (low.ln() + (high.ln() - low.ln()) * rng.random::<f64>()).exp();
            sampler.draw(spec.base_point(), rho, &mut rng)
        })
        .collect()
}

enum Sampler {
    Finite(Vec<CVec>),
    Param(ParamMap),
    Implicit(PolySystem),
}

impl Sampler {
    fn new(spec: &VarietySpec) -> Result<Self> {
        Ok(match spec.form() {
            Form::Finite { points } => Sampler::Finite(points.clone()),
            Form::Graph { .. } | Form::Parametric { .. } => Sampler::Param(ParamMap::new(spec)),
            Form::Implicit { equations } => {
                Sampler::Implicit(PolySystem::new(spec.ambient_dim(), equations))
            }
            Form::Intersection { .. } => match spec.implicit_equations() {
                Some(eqs) => Sampler::Implicit(PolySystem::new(spec.ambient_dim(), &eqs)),
                None => {
                    return Err(Error::Unsupported(
                        "sampling an intersection involving a parametric set".into(),
                    ))
                }
            },
        })
    }

    fn draw<R: Rng>(&self, x0: &[Complex64], rho: f64, rng: &mut R) -> Result<CVec> {
        match self {
            Sampler::Finite(_) => unreachable!("finite sets return their points"),
            Sampler::Param(map) => {
                for _ in 0..ATTEMPTS {
                    let dir = seed::unit_sphere(rng, map.param_dim());
                    if let Some(p) = point_at_radius(map, x0, &dir, rho) {
                        return Ok(p);
                    }
                }
                Err(Error::Insufficient(format!(
                    "no parameter direction reaches distance {rho:e}"
                )))
            }
            Sampler::Implicit(sys) => {
                let mut fallback: Option<CVec> = None;
                for _ in 0..ATTEMPTS {
                    let g = seed::unit_sphere(rng, x0.len());
                    let start = cvec::axpy(x0, Complex64::new(rho, 0.0), &g);
                    let (y, residual) = newton_project(sys, start, 200);
                    if residual >= SAMPLE_RESIDUAL {
                        continue;
                    }
                    let d = cvec::distance(&y, x0);
                    if d >= rho / 16.0 && d <= 2.0 * rho {
                        return Ok(y);
                    }
                    if d > 0.0 && fallback.is_none() {
                        fallback = Some(y);
                    }
                }
                fallback.ok_or_else(|| {
                    Error::Insufficient(format!(
                        "projection onto the set failed {ATTEMPTS} times at distance {rho:e}"
                    ))
                })
            }
        }
    }
}

/// Bisection on `s` so that `‖φ(s·dir) − x0‖ = rho`.
fn point_at_radius(map: &ParamMap, x0: &[Complex64], dir: &[Complex64], rho: f64) -> Option<CVec> {
    let dist = |s: f64| {
        let t = cvec::scale(dir, Complex64::new(s, 0.0));
        cvec::distance(&map.point(&t), x0)
    };
    let mut hi = rho;
    let mut grown = 0;
    while dist(hi) < rho {
        hi *= 2.0;
        grown += 1;
        if grown > 60 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if dist(mid) < rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(map.point(&cvec::scale(dir, Complex64::new(hi, 0.0))))
}
