//! Separation samples and the Łojasiewicz exponent estimator.
//!
//! Probe points are stratified into dyadic shells around the base point.
//! For each probe `x` the oracles give `ρ(x, Y)`, `ρ(x, X ∩ Y)` and, in
//! two-sided mode, `ρ(x, X)`. Per shell, the smallest value of `log ρ(x, Y)`
//! (one-sided, probes on `X`) or `log(ρ(x, X) + ρ(x, Y))` (two-sided) is the
//! envelope; the exponent estimate is the least-squares slope of the
//! envelope against the shell's log-radius over the deepest shells.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cvec::{self, CVec};
use crate::error::{Error, Result};
use crate::seed;
use crate::variety::{
    distance, intersect, membership, sample_in_band, DistanceOptions, DistanceResult, VarietySpec,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Probes on `X`; the left side is `ρ(x, Y)`.
    OneSided,
    /// Probes anywhere near `x0`; the left side is `ρ(x, X) + ρ(x, Y)`.
    TwoSided,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::OneSided => "one_sided",
            Mode::TwoSided => "two_sided",
        }
    }
}

/// How two-sided probes are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeStrategy {
    /// Uniform directions in the ambient space only.
    Isotropic,
    /// A third each of ambient, on-`X` and on-`Y` probes.
    Mixed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EstimatorOptions {
    pub radius: f64,
    /// Number of dyadic shells `J`.
    pub shells: u32,
    pub per_shell: usize,
    pub probes: ProbeStrategy,
    /// Samples with `ρ(x, X ∩ Y)` below this are dropped.
    pub drop_threshold: f64,
    /// Left-side values below this count as zero.
    pub containment_tolerance: f64,
    pub distance: DistanceOptions,
    pub seed: u64,
}

impl Default for EstimatorOptions {
    fn default() -> Self {
        EstimatorOptions {
            radius: 1.0,
            shells: 14,
            per_shell: 64,
            probes: ProbeStrategy::Mixed,
            drop_threshold: 1e-12,
            containment_tolerance: 1e-14,
            distance: DistanceOptions::default(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitOptions {
    /// Fraction of the configured shells (rounded up) used for the fit,
    /// taken from the deepest populated ones.
    pub fit_fraction: f64,
    /// Shells with fewer usable samples are ignored.
    pub min_shell_count: usize,
    pub containment_fraction: f64,
    pub drop_fraction: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            fit_fraction: 0.5,
            min_shell_count: 4,
            containment_fraction: 0.5,
            drop_fraction: 0.5,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationSample {
    #[serde(with = "pairs")]
    pub x: CVec,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d_x: Option<f64>,
    pub d_y: f64,
    pub d_xy: f64,
    pub shell_index: i64,
}

impl SeparationSample {
    /// `ρ(x, Y)` or `ρ(x, X) + ρ(x, Y)`.
    pub fn lhs(&self) -> f64 {
        self.d_x.unwrap_or(0.0) + self.d_y
    }
}

mod pairs {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::cvec::{self, CVec};

    pub fn serialize<S: Serializer>(v: &CVec, s: S) -> Result<S::Ok, S::Error> {
        cvec::to_pairs(v).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CVec, D::Error> {
        Ok(cvec::from_pairs(&Vec::<[f64; 2]>::deserialize(d)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub mode: Mode,
    pub radius: f64,
    pub shells: u32,
    /// Kept samples (`ρ(x, X ∩ Y)` above the drop threshold).
    pub samples: Vec<SeparationSample>,
    pub raw_count: usize,
    pub dropped_count: usize,
    /// Raw samples whose left side is zero, dropped or not.
    pub zero_lhs_count: usize,
    /// Oracle calls that did not certify stationarity.
    pub unconverged_count: usize,
    pub containment_tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShellBin {
    pub shell: i64,
    pub log_r_center: f64,
    pub envelope: f64,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub mode: Mode,
    pub nu_hat: Option<f64>,
    pub c_hat: Option<f64>,
    pub bin_table: Vec<ShellBin>,
    /// Shells used in the fit.
    pub fitted_shells: Vec<i64>,
    /// Root-mean-square residual of the fit.
    pub fit_residual: Option<f64>,
    pub degenerate: bool,
    pub reason: Option<String>,
    pub raw_count: usize,
    pub dropped_count: usize,
    pub zero_lhs_count: usize,
    pub unconverged_count: usize,
}

impl ExponentEstimate {
    /// `shell,log_r_center,envelope,count` rows with a header line.
    pub fn bin_table_csv(&self) -> String {
        let mut out = String::from("shell,log_r_center,envelope,count\n");
        for b in &self.bin_table {
            let _ = writeln!(out, "{},{:?},{:?},{}", b.shell, b.log_r_center, b.envelope, b.count);
        }
        out
    }

    pub fn nu(&self) -> Result<f64> {
        self.nu_hat.ok_or_else(|| {
            Error::Degenerate(self.reason.clone().unwrap_or_else(|| "no estimate".into()))
        })
    }
}

/// `⌊−log2(d / r)⌋`
pub fn shell_index(d: f64, radius: f64) -> i64 {
    (-(d / radius).log2()).floor() as i64
}

/// `ln r − (j + 1/2) ln 2`
pub fn shell_center(shell: i64, radius: f64) -> f64 {
    radius.ln() - (shell as f64 + 0.5) * std::f64::consts::LN_2
}

struct Probe {
    x: CVec,
    on_x: bool,
    on_y: bool,
    seed: u64,
}

pub fn collect_samples(
    x: &VarietySpec,
    y: &VarietySpec,
    mode: Mode,
    opts: &EstimatorOptions,
) -> Result<SampleSet> {
    if x.ambient_dim() != y.ambient_dim() {
        return Err(Error::dim(x.ambient_dim(), y.ambient_dim()));
    }
    let x0 = x.base_point();
    if !membership(x, x0, 1e-9) || !membership(y, x0, 1e-9) || cvec::distance(x0, y.base_point()) > 0.0 {
        return Err(Error::BasePointMismatch);
    }
    if !(opts.radius > 0.0 && opts.radius.is_finite()) {
        return Err(Error::invalid("radius must be positive"));
    }
    if opts.shells < 4 {
        return Err(Error::invalid("at least 4 shells are needed"));
    }
    if opts.per_shell < 16 {
        return Err(Error::invalid("at least 16 samples per shell are needed"));
    }
    let xy = intersect(x, y)?;
    let probes = generate_probes(x, y, mode, opts)?;
    if probes.is_empty() {
        return Err(Error::Insufficient("no probe points were generated".into()));
    }

    let measured: Vec<Result<(SeparationSample, usize)>> = probes
        .into_par_iter()
        .map(|p| {
            let oracle = |set: &VarietySpec, k: u64| -> Result<DistanceResult> {
                let mut o = opts.distance.clone();
                o.seed = seed::derive(p.seed, &[k]);
                distance(set, &p.x, &o)
            };
            let mut unconverged = 0;
            let mut run = |set: &VarietySpec, k: u64| -> Result<f64> {
                let r = oracle(set, k)?;
                if !r.converged {
                    unconverged += 1;
                }
                Ok(r.distance)
            };
            // probes drawn on a set are at distance zero by construction
            let d_y = if p.on_y { 0.0 } else { run(y, 1)? };
            let d_x = match mode {
                Mode::OneSided => None,
                Mode::TwoSided => Some(if p.on_x { 0.0 } else { run(x, 0)? }),
            };
            let d_xy = run(&xy, 2)?;
            Ok((
                SeparationSample {
                    shell_index: shell_index(d_xy, opts.radius),
                    x: p.x,
                    d_x,
                    d_y,
                    d_xy,
                },
                unconverged,
            ))
        })
        .collect();

    let mut set = SampleSet {
        mode,
        radius: opts.radius,
        shells: opts.shells,
        samples: Vec::new(),
        raw_count: measured.len(),
        dropped_count: 0,
        zero_lhs_count: 0,
        unconverged_count: 0,
        containment_tolerance: opts.containment_tolerance,
    };
    for m in measured {
        let (s, unconverged) = m?;
        set.unconverged_count += unconverged;
        if s.lhs() < opts.containment_tolerance {
            set.zero_lhs_count += 1;
        }
        if s.d_xy < opts.drop_threshold {
            set.dropped_count += 1;
        } else {
            set.samples.push(s);
        }
    }
    Ok(set)
}

fn generate_probes(
    x: &VarietySpec,
    y: &VarietySpec,
    mode: Mode,
    opts: &EstimatorOptions,
) -> Result<Vec<Probe>> {
    let x0 = x.base_point();
    let n = opts.per_shell;
    let mut probes = Vec::new();
    for j in 0..opts.shells {
        let hi = opts.radius * 0.5f64.powi(j as i32);
        let lo = hi * 0.5;
        let shell_seed = seed::derive(opts.seed, &[j as u64]);
        let on_set = |set: &VarietySpec, count: usize, tag: u64| {
            sample_in_band(set, lo, hi, count, seed::derive(shell_seed, &[tag]))
        };
        let (n_ambient, n_x, n_y) = match (mode, opts.probes) {
            (Mode::OneSided, _) => (0, n, 0),
            (Mode::TwoSided, ProbeStrategy::Isotropic) => (n, 0, 0),
            (Mode::TwoSided, ProbeStrategy::Mixed) => (n - 2 * (n / 3), n / 3, n / 3),
        };
        let mut rng = seed::rng(seed::derive(shell_seed, &[0]));
        for _ in 0..n_ambient {
            let rho = (lo.ln() + std::f64::consts::LN_2 * rng.random::<f64>()).exp();
            let u = seed::unit_sphere(&mut rng, x0.len());
            probes.push(Probe {
                x: cvec::axpy(x0, Complex64::new(rho, 0.0), &u),
                on_x: false,
                on_y: false,
                seed: 0,
            });
        }
        if n_x > 0 {
            for p in on_set(x, n_x, 1)? {
                probes.push(Probe { x: p, on_x: true, on_y: false, seed: 0 });
            }
        }
        if n_y > 0 {
            for p in on_set(y, n_y, 2)? {
                probes.push(Probe { x: p, on_x: false, on_y: true, seed: 0 });
            }
        }
    }
    for (k, p) in probes.iter_mut().enumerate() {
        p.seed = seed::derive(opts.seed, &[u64::MAX, k as u64]);
    }
    Ok(probes)
}

pub fn estimate_exponent(set: &SampleSet, fit: &FitOptions) -> Result<ExponentEstimate> {
    let mut est = ExponentEstimate {
        mode: set.mode,
        nu_hat: None,
        c_hat: None,
        bin_table: Vec::new(),
        fitted_shells: Vec::new(),
        fit_residual: None,
        degenerate: false,
        reason: None,
        raw_count: set.raw_count,
        dropped_count: set.dropped_count,
        zero_lhs_count: set.zero_lhs_count,
        unconverged_count: set.unconverged_count,
    };
    let raw = set.raw_count.max(1) as f64;
    if set.zero_lhs_count as f64 > fit.containment_fraction * raw {
        est.degenerate = true;
        est.reason = Some("local containment".into());
        return Ok(est);
    }
    if set.dropped_count as f64 > fit.drop_fraction * raw {
        est.degenerate = true;
        est.reason = Some("intersection fills the probe set".into());
        return Ok(est);
    }

    let mut bins: std::collections::BTreeMap<i64, (f64, usize)> = Default::default();
    for s in &set.samples {
        let lhs = s.lhs();
        if lhs < set.containment_tolerance {
            continue;
        }
        let e = bins.entry(s.shell_index).or_insert((f64::INFINITY, 0));
        e.0 = e.0.min(lhs.ln());
        e.1 += 1;
    }
    est.bin_table = bins
        .iter()
        .map(|(&shell, &(envelope, count))| ShellBin {
            shell,
            log_r_center: shell_center(shell, set.radius),
            envelope,
            count,
        })
        .collect();

    let populated: Vec<&ShellBin> = est
        .bin_table
        .iter()
        .filter(|b| b.count >= fit.min_shell_count)
        .collect();
    let take = ((set.shells as f64 * fit.fit_fraction).ceil() as usize).max(2);
    let fitted: Vec<&ShellBin> = populated.iter().rev().take(take).rev().copied().collect();
    if fitted.len() < 2 {
        return Err(Error::Insufficient(format!(
            "{} populated shells, need at least 2",
            fitted.len()
        )));
    }
    let xs: Vec<f64> = fitted.iter().map(|b| b.log_r_center).collect();
    let ys: Vec<f64> = fitted.iter().map(|b| b.envelope).collect();
    let (slope, intercept, rms) = least_squares_line(&xs, &ys);
    est.fitted_shells = fitted.iter().map(|b| b.shell).collect();
    est.nu_hat = Some(slope);
    est.c_hat = Some(intercept.exp());
    est.fit_residual = Some(rms);
    Ok(est)
}

/// Ordinary least squares `y ≈ a x + b`; returns `(a, b, rms residual)`.
fn least_squares_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let rms = (xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - a * x - b).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (a, b, rms)
}

/// Collects samples and fits the exponent.
pub fn estimate(
    x: &VarietySpec,
    y: &VarietySpec,
    mode: Mode,
    opts: &EstimatorOptions,
    fit: &FitOptions,
) -> Result<(SampleSet, ExponentEstimate)> {
    let set = collect_samples(x, y, mode, opts)?;
    let est = estimate_exponent(&set, fit)?;
    Ok((set, est))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparationCheck {
    pub checked: usize,
    pub violations: usize,
    pub fraction: f64,
    /// Smallest `ln lhs − ln c − ν ln ρ(x, X ∩ Y)`; negative on violation.
    pub worst_log_margin: f64,
}

/// Tests `lhs ≥ c · ρ(x, X ∩ Y)^ν` on the stored samples, optionally only
/// on shells at least `min_shell` deep.
pub fn verify_separation(set: &SampleSet, nu: f64, c: f64, min_shell: Option<i64>) -> Result<SeparationCheck> {
    if !(nu > 0.0 && c > 0.0) {
        return Err(Error::invalid("exponent and constant must be positive"));
    }
    let mut out = SeparationCheck {
        checked: 0,
        violations: 0,
        fraction: 0.0,
        worst_log_margin: f64::INFINITY,
    };
    for s in &set.samples {
        if min_shell.is_some_and(|m| s.shell_index < m) {
            continue;
        }
        out.checked += 1;
        let margin = s.lhs().ln() - c.ln() - nu * s.d_xy.ln();
        if margin < 0.0 {
            out.violations += 1;
        }
        out.worst_log_margin = out.worst_log_margin.min(margin);
    }
    if out.checked > 0 {
        out.fraction = out.violations as f64 / out.checked as f64;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModesReport {
    pub nu_one_sided: f64,
    pub nu_two_sided: f64,
    pub gap: f64,
    pub one_sided: ExponentEstimate,
    pub two_sided: ExponentEstimate,
}

/// Estimates the exponent in both modes. Fails if either estimate is
/// degenerate or below `floor`.
pub fn modes_consistency(
    x: &VarietySpec,
    y: &VarietySpec,
    opts: &EstimatorOptions,
    fit: &FitOptions,
    floor: f64,
) -> Result<ModesReport> {
    let (_, one) = estimate(x, y, Mode::OneSided, opts, fit)?;
    let (_, two) = estimate(x, y, Mode::TwoSided, opts, fit)?;
    let nu_one = one.nu()?;
    let nu_two = two.nu()?;
    for (label, nu) in [("one-sided", nu_one), ("two-sided", nu_two)] {
        if nu < floor {
            return Err(Error::Degenerate(format!(
                "{label} estimate {nu:.3} is below the floor {floor}"
            )));
        }
    }
    Ok(ModesReport {
        nu_one_sided: nu_one,
        nu_two_sided: nu_two,
        gap: (nu_one - nu_two).abs(),
        one_sided: one,
        two_sided: two,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_are_dyadic() {
        assert_eq!(shell_index(1.0, 1.0), 0);
        assert_eq!(shell_index(0.75, 1.0), 0);
        assert_eq!(shell_index(0.5, 1.0), 1);
        assert_eq!(shell_index(0.3, 1.0), 1);
        assert_eq!(shell_index(0.2, 1.0), 2);
        // geometric midpoint of [1/2, 1]
        assert!((shell_center(0, 1.0) - 0.5f64.sqrt().ln()).abs() < 1e-15);
    }

    #[test]
    fn line_fit_is_exact_on_a_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        let (a, b, r) = least_squares_line(&xs, &ys);
        assert!((a - 2.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14 && r < 1e-14);
    }
}
