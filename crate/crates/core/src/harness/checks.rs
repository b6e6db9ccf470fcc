//! The individual checks. Each public function is usable on its own; the
//! runner wraps them into report records.

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{ComparabilityParams, SectionParams, TangencyParams};
use crate::cvec::{self, CVec};
use crate::error::{Error, Result};
use crate::geometry::{lemma1_bound_check, sample_generic_hyperplane, Hyperplane, Lemma1Outcome};
use crate::lojasiewicz::{estimate, shell_center, EstimatorOptions, ExponentEstimate, FitOptions};
use crate::seed;
use crate::tangency::{exponent_lower_bound, order_of_tangency, ExponentBound, TangencyReport};
use crate::variety::{distance, section, section_with_frame, Form, VarietySpec};

fn with_seed(opts: &EstimatorOptions, seed: u64) -> EstimatorOptions {
    let mut o = opts.clone();
    o.seed = seed;
    o
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionTrial {
    pub trial: usize,
    pub normal: Vec<[f64; 2]>,
    pub nu_hat: Option<f64>,
    /// Set when the sectioned pair gave no estimate; such trials are
    /// counted apart from the judged ones.
    pub degenerate: Option<String>,
    pub satisfied: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectionRecord {
    pub ambient: ExponentEstimate,
    pub nu_ambient: f64,
    pub trials: Vec<SectionTrial>,
    pub satisfied: usize,
    pub judged: usize,
    pub degenerate: usize,
    /// `satisfied / judged`
    pub fraction: f64,
    pub median: Option<f64>,
}

/// Estimates the exponent of `(X, Y)` and of `(X ∩ H, Y ∩ H)` for random
/// hyperplanes `H` through the base point.
pub fn check_section_monotonicity(
    x: &VarietySpec,
    y: &VarietySpec,
    params: &SectionParams,
    opts: &EstimatorOptions,
    fit: &FitOptions,
    seed: u64,
) -> Result<SectionRecord> {
    let (_, ambient) = estimate(x, y, params.mode, &with_seed(opts, seed::derive(seed, &[0])), fit)?;
    let nu_ambient = ambient.nu()?;
    if nu_ambient < params.floor {
        return Err(Error::Degenerate(format!(
            "ambient estimate {nu_ambient:.3} is below the floor {}",
            params.floor
        )));
    }
    let m = x.ambient_dim();
    let trials: Vec<SectionTrial> = (0..params.trials)
        .into_par_iter()
        .map(|t| -> Result<SectionTrial> {
            let h = sample_generic_hyperplane(m, x.base_point(), seed::derive(seed, &[1, t as u64]))?;
            let xs = section(x, &h, 0)?;
            let ys = section(y, &h, 0)?;
            let trial_opts = with_seed(opts, seed::derive(seed, &[2, t as u64]));
            let outcome = estimate(&xs, &ys, params.mode, &trial_opts, fit)
                .and_then(|(_, est)| est.nu());
            let normal = cvec::to_pairs(h.normal());
            Ok(match outcome {
                Ok(nu) => SectionTrial {
                    trial: t,
                    normal,
                    nu_hat: Some(nu),
                    degenerate: None,
                    satisfied: nu <= nu_ambient + params.tol_section,
                },
                Err(e) => SectionTrial {
                    trial: t,
                    normal,
                    nu_hat: None,
                    degenerate: Some(e.to_string()),
                    satisfied: false,
                },
            })
        })
        .collect::<Result<_>>()?;
    let judged = trials.iter().filter(|t| t.nu_hat.is_some()).count();
    let satisfied = trials.iter().filter(|t| t.satisfied).count();
    let mut values: Vec<f64> = trials.iter().filter_map(|t| t.nu_hat).collect();
    values.sort_by(f64::total_cmp);
    Ok(SectionRecord {
        nu_ambient,
        ambient,
        satisfied,
        judged,
        degenerate: trials.len() - judged,
        fraction: if judged > 0 { satisfied as f64 / judged as f64 } else { 0.0 },
        median: median(&values),
        trials,
    })
}

fn median(sorted: &[f64]) -> Option<f64> {
    let n = sorted.len();
    match n {
        0 => None,
        _ if n % 2 == 1 => Some(sorted[n / 2]),
        _ => Some(0.5 * (sorted[n / 2 - 1] + sorted[n / 2])),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityTrial {
    pub trial: usize,
    pub normal: Vec<[f64; 2]>,
    /// Largest ratio per shell, shallow to deep; `None` for shells without
    /// usable samples.
    pub shell_maxima: Vec<Option<f64>>,
    /// `max_j c_j / min_j c_j`
    pub spread: Option<f64>,
    /// Slope of `log c_j` against the shell log-radius.
    pub growth_slope: Option<f64>,
    pub excluded: usize,
    pub passed: bool,
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparabilityRecord {
    pub trials: Vec<ComparabilityTrial>,
    pub passed: usize,
    pub evaluated: usize,
    pub skipped: usize,
    /// `passed / evaluated`
    pub fraction: f64,
}

/// Compares `ρ(x, X ∩ H)` with `ρ(x, X)` for `x ∈ H` shell by shell.
pub fn check_distance_comparability(
    x: &VarietySpec,
    params: &ComparabilityParams,
    opts: &EstimatorOptions,
    seed: u64,
) -> Result<ComparabilityRecord> {
    let m = x.ambient_dim();
    let trials: Vec<ComparabilityTrial> = (0..params.trials)
        .into_par_iter()
        .map(|t| -> Result<ComparabilityTrial> {
            let h = match &params.hyperplane {
                Some(h) => h.clone(),
                None => sample_generic_hyperplane(m, x.base_point(), seed::derive(seed, &[1, t as u64]))?,
            };
            let normal = cvec::to_pairs(h.normal());
            Ok(match comparability_trial(x, &h, params, opts, seed::derive(seed, &[2, t as u64])) {
                Ok((maxima, excluded)) => judge_ratios(t, normal, maxima, excluded, params, opts.radius),
                Err(e) => ComparabilityTrial {
                    trial: t,
                    normal,
                    shell_maxima: Vec::new(),
                    spread: None,
                    growth_slope: None,
                    excluded: 0,
                    passed: false,
                    skipped: Some(e.to_string()),
                },
            })
        })
        .collect::<Result<_>>()?;
    let evaluated = trials.iter().filter(|t| t.skipped.is_none()).count();
    let passed = trials.iter().filter(|t| t.passed).count();
    Ok(ComparabilityRecord {
        passed,
        evaluated,
        skipped: trials.len() - evaluated,
        fraction: if evaluated > 0 { passed as f64 / evaluated as f64 } else { 0.0 },
        trials,
    })
}

fn comparability_trial(
    x: &VarietySpec,
    h: &Hyperplane,
    params: &ComparabilityParams,
    opts: &EstimatorOptions,
    seed: u64,
) -> Result<(Vec<Option<f64>>, usize)> {
    let (xs, frame) = section_with_frame(x, h, 0)?;
    let per_shell = params.per_shell.unwrap_or(opts.per_shell);
    let mut excluded = 0;
    let mut maxima = Vec::with_capacity(opts.shells as usize);
    for j in 0..opts.shells {
        let hi = opts.radius * 0.5f64.powi(j as i32);
        let lo = hi * 0.5;
        let mut rng = seed::rng(seed::derive(seed, &[j as u64]));
        let mut best: Option<f64> = None;
        for k in 0..per_shell {
            let rho = (lo.ln() + std::f64::consts::LN_2 * rng.random::<f64>()).exp();
            let t: CVec = cvec::scale(&seed::unit_sphere(&mut rng, x.ambient_dim() - 1), Complex64::new(rho, 0.0));
            let point = frame.point(&t);
            let mut dopts = opts.distance.clone();
            dopts.seed = seed::derive(seed, &[j as u64, k as u64]);
            let d_x = distance(x, &point, &dopts)?.distance;
            if d_x < params.min_distance {
                excluded += 1;
                continue;
            }
            let d_xh = distance(&xs, &t, &dopts)?.distance;
            let ratio = d_xh / d_x;
            best = Some(best.map_or(ratio, |b: f64| b.max(ratio)));
        }
        maxima.push(best);
    }
    Ok((maxima, excluded))
}

fn judge_ratios(
    trial: usize,
    normal: Vec<[f64; 2]>,
    maxima: Vec<Option<f64>>,
    excluded: usize,
    params: &ComparabilityParams,
    radius: f64,
) -> ComparabilityTrial {
    let points: Vec<(f64, f64)> = maxima
        .iter()
        .enumerate()
        .filter_map(|(j, c)| c.map(|c| (shell_center(j as i64, radius), c.ln())))
        .collect();
    let mut out = ComparabilityTrial {
        trial,
        normal,
        shell_maxima: maxima,
        spread: None,
        growth_slope: None,
        excluded,
        passed: false,
        skipped: None,
    };
    if points.len() < 2 {
        out.skipped = Some("fewer than two shells with usable samples".into());
        return out;
    }
    let hi = points.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let spread = (hi - lo).exp();
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    out.spread = Some(spread);
    out.growth_slope = Some(slope);
    out.passed = spread <= params.ratio_bound && slope >= params.growth_floor;
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TangencyRecord {
    pub report: TangencyReport,
    pub bound: ExponentBound,
    pub estimate: Option<ExponentEstimate>,
    pub nu_hat: Option<f64>,
    pub passed: bool,
    pub skipped: Option<String>,
}

/// Order of tangency `s` of two graphs at the base point, checked against
/// the estimate via `s ≤ ν̂ − 1 + tol`.
pub fn check_tangency_bound(
    x: &VarietySpec,
    y: &VarietySpec,
    params: &TangencyParams,
    opts: &EstimatorOptions,
    fit: &FitOptions,
) -> Result<TangencyRecord> {
    let (Form::Graph { param_dim: p, components: f }, Form::Graph { param_dim: q, components: g }) =
        (x.form(), y.form())
    else {
        return Err(Error::invalid("tangency needs two graphs"));
    };
    if p != q {
        return Err(Error::invalid("graphs over different parameter spaces"));
    }
    let report = order_of_tangency(f, g, &cvec::zeros(*p), params.truncation, params.jet_tolerance)?;
    let bound = exponent_lower_bound(&report);
    let Some(s) = report.s else {
        return Ok(TangencyRecord {
            report,
            bound,
            estimate: None,
            nu_hat: None,
            passed: false,
            skipped: Some("order of tangency exceeds the truncation degree".into()),
        });
    };
    let (_, est) = estimate(x, y, params.mode, opts, fit)?;
    let nu = est.nu()?;
    Ok(TangencyRecord {
        report,
        bound,
        passed: s as f64 <= nu - 1.0 + params.tol,
        nu_hat: Some(nu),
        estimate: Some(est),
        skipped: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lemma1Sweep {
    pub angle: f64,
    pub requested: usize,
    pub draws: usize,
    /// Draws meeting every hypothesis of the bound.
    pub admissible: usize,
    pub passed: usize,
    pub counterexamples: Vec<Lemma1Outcome>,
    /// Rejected draws by reason.
    pub rejected: std::collections::BTreeMap<String, usize>,
}

/// Draws random configurations `(H0, y0 ∈ H0, y1 near y0)` in `C^m` until
/// `configs` of them meet the hypotheses or the draw budget
/// `configs · attempts_per_config` is spent, and checks the bound on each.
pub fn lemma1_sweep(
    x0: &[Complex64],
    angle: f64,
    configs: usize,
    attempts_per_config: usize,
    seed: u64,
) -> Result<Lemma1Sweep> {
    let m = x0.len();
    let budget = configs.saturating_mul(attempts_per_config.max(1));
    let mut sweep = Lemma1Sweep {
        angle,
        requested: configs,
        draws: 0,
        admissible: 0,
        passed: 0,
        counterexamples: Vec::new(),
        rejected: Default::default(),
    };
    while sweep.admissible < configs && sweep.draws < budget {
        let k = sweep.draws as u64;
        sweep.draws += 1;
        let mut rng = seed::rng(seed::derive(seed, &[k]));
        let h0 = sample_generic_hyperplane(m, x0, seed::derive(seed, &[k, 0]))?;
        let r0 = (1e-3f64.ln() * rng.random::<f64>()).exp();
        let off = cvec::axpy(x0, Complex64::new(r0, 0.0), &seed::unit_sphere(&mut rng, m));
        let y0 = h0.project(&off);
        let reach = cvec::distance(&y0, x0) / 10.0;
        let step = reach * rng.random::<f64>();
        let y1 = cvec::axpy(&y0, Complex64::new(step, 0.0), &seed::unit_sphere(&mut rng, m));
        match lemma1_bound_check(&y0, &y1, &h0, angle)? {
            Lemma1Outcome::Skip { reason } => *sweep.rejected.entry(reason).or_insert(0) += 1,
            outcome @ Lemma1Outcome::Fail { .. } => {
                sweep.admissible += 1;
                sweep.counterexamples.push(outcome);
            }
            Lemma1Outcome::Pass { .. } => {
                sweep.admissible += 1;
                sweep.passed += 1;
            }
        }
    }
    Ok(sweep)
}
