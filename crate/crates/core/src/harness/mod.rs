//! Scenario runner: executes checks on a pair of sets and assembles a
//! versioned report.
//!
//! Each check gets its own seed derived from the scenario seed and its
//! position in the check list, so results do not depend on the order in
//! which checks are scheduled.

mod checks;
mod scenario;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lojasiewicz::{estimate, modes_consistency, EstimatorOptions, ExponentEstimate};
use crate::seed;

pub use checks::{
    check_distance_comparability, check_section_monotonicity, check_tangency_bound, lemma1_sweep,
    ComparabilityRecord, ComparabilityTrial, Lemma1Sweep, SectionRecord, SectionTrial,
    TangencyRecord,
};
pub use scenario::{
    CheckSpec, ComparabilityParams, EstimateParams, Lemma1Params, ModesParams, Scenario,
    SectionParams, TangencyParams,
};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skip => "skip",
            Status::Error => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub index: usize,
    pub kind: String,
    pub seed: u64,
    pub status: Status,
    /// Every tolerance the verdict was judged against.
    pub tolerances: BTreeMap<String, f64>,
    pub inputs: Value,
    /// The number the verdict mainly rests on (an estimate, a fraction, a
    /// gap), for flat exports.
    pub headline: Option<f64>,
    pub results: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub duration_ms: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub errored: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    /// True when no check failed or errored.
    pub fn success(&self) -> bool {
        self.summary.failed == 0 && self.summary.errored == 0
    }

    /// Copy with all durations zeroed, for reproducibility comparisons.
    pub fn without_durations(&self) -> Report {
        let mut r = self.clone();
        for c in &mut r.checks {
            c.duration_ms = 0.0;
        }
        r
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per check.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,kind,status,seed,headline,tolerances,message,duration_ms\n");
        for c in &self.checks {
            let tolerances: Vec<String> = c.tolerances.iter().map(|(k, v)| format!("{k}={v:?}")).collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{:.3}",
                c.index,
                c.kind,
                c.status.as_str(),
                c.seed,
                c.headline.map(|h| format!("{h:?}")).unwrap_or_default(),
                csv_field(&tolerances.join(";")),
                csv_field(c.message.as_deref().unwrap_or("")),
                c.duration_ms
            );
        }
        out
    }

    /// Per-shell tables of every estimate in the report, as CSV blocks.
    pub fn shell_tables(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let mut found = Vec::new();
            collect_estimates(&c.results, String::new(), &mut found);
            for (path, est) in found {
                let _ = writeln!(out, "# check {} ({}){}", c.index, c.kind, path);
                out.push_str(&est.bin_table_csv());
            }
        }
        out
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn collect_estimates(v: &Value, path: String, out: &mut Vec<(String, ExponentEstimate)>) {
    match v {
        Value::Object(map) => {
            if map.contains_key("bin_table") {
                if let Ok(est) = serde_json::from_value::<ExponentEstimate>(v.clone()) {
                    out.push((path, est));
                    return;
                }
            }
            for (k, child) in map {
                collect_estimates(child, format!("{path} {k}"), out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                collect_estimates(child, format!("{path}[{i}]"), out);
            }
        }
        _ => {}
    }
}

struct Outcome {
    status: Status,
    tolerances: BTreeMap<String, f64>,
    headline: Option<f64>,
    results: Value,
    message: Option<String>,
}

fn tolerances<const N: usize>(pairs: [(&str, f64); N]) -> BTreeMap<String, f64> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn verdict(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Loads, validates and runs a scenario file.
pub fn run_scenario(path: &Path) -> Result<Report> {
    let scenario = Scenario::load(path)?;
    Ok(run(&scenario, None))
}

/// Runs every check of a validated scenario. `seed` overrides the
/// scenario's own seed.
pub fn run(scenario: &Scenario, seed: Option<u64>) -> Report {
    let seed = seed.unwrap_or(scenario.seed);
    let checks: Vec<CheckRecord> = scenario
        .checks
        .par_iter()
        .enumerate()
        .map(|(index, spec)| {
            let check_seed = seed::derive(seed, &[index as u64]);
            let started = Instant::now();
            let outcome = run_check(scenario, spec, check_seed).unwrap_or_else(|e| Outcome {
                status: Status::Error,
                tolerances: BTreeMap::new(),
                headline: None,
                results: Value::Null,
                message: Some(e.to_string()),
            });
            CheckRecord {
                index,
                kind: spec.kind().to_string(),
                seed: check_seed,
                status: outcome.status,
                tolerances: outcome.tolerances,
                inputs: serde_json::to_value(spec).expect("check spec serializes"),
                headline: outcome.headline,
                results: outcome.results,
                message: outcome.message,
                duration_ms: started.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect();
    let mut summary = Summary {
        total: checks.len(),
        ..Default::default()
    };
    for c in &checks {
        match c.status {
            Status::Pass => summary.passed += 1,
            Status::Fail => summary.failed += 1,
            Status::Skip => summary.skipped += 1,
            Status::Error => summary.errored += 1,
        }
    }
    Report {
        schema_version: SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        seed,
        checks,
        summary,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

fn estimator_with_seed(scenario: &Scenario, seed: u64) -> EstimatorOptions {
    let mut o = scenario.estimator.clone();
    o.seed = seed;
    o
}

fn run_check(scenario: &Scenario, spec: &CheckSpec, seed: u64) -> Result<Outcome> {
    let x = &scenario.x;
    let y = scenario.y.as_ref();
    let need_y = || y.ok_or_else(|| Error::invalid("this check needs the set `y`"));
    let fit = &scenario.fit;
    match spec {
        CheckSpec::Estimate(p) => {
            let y = need_y()?;
            let seeds: Vec<u64> = match &p.seeds {
                Some(list) if !list.is_empty() => list.iter().map(|s| seed::derive(seed, &[*s])).collect(),
                _ => vec![seed],
            };
            let mut estimates = Vec::with_capacity(seeds.len());
            for s in &seeds {
                let (_, est) = estimate(x, y, p.mode, &estimator_with_seed(scenario, *s), fit)?;
                if est.degenerate {
                    return Err(Error::Degenerate(
                        est.reason.clone().unwrap_or_else(|| "degenerate estimate".into()),
                    ));
                }
                estimates.push(est);
            }
            let nus: Vec<f64> = estimates.iter().map(|e| e.nu()).collect::<Result<_>>()?;
            let lo = nus.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = nus.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut tol = tolerances([("floor", p.floor)]);
            let mut ok = lo >= p.floor;
            if let Some([a, b]) = p.expected {
                tol.insert("expected_low".into(), a);
                tol.insert("expected_high".into(), b);
                ok &= lo >= a && hi <= b;
            }
            if nus.len() > 1 {
                tol.insert("max_spread".into(), p.max_spread);
                ok &= hi - lo <= p.max_spread;
            }
            Ok(Outcome {
                status: verdict(ok),
                tolerances: tol,
                headline: Some(nus[0]),
                results: json!({
                    "nu_hat": nus,
                    "spread": hi - lo,
                    "estimates": to_value(&estimates),
                }),
                message: None,
            })
        }
        CheckSpec::SectionMonotonicity(p) => {
            let y = need_y()?;
            let opts = estimator_with_seed(scenario, seed);
            let rec = check_section_monotonicity(x, y, p, &opts, fit, seed)?;
            let mut tol = tolerances([
                ("tol_section", p.tol_section),
                ("pass_fraction", p.pass_fraction),
                ("floor", p.floor),
            ]);
            let mut ok = rec.judged > 0 && rec.fraction >= p.pass_fraction;
            if let Some([a, b]) = p.median_range {
                tol.insert("median_low".into(), a);
                tol.insert("median_high".into(), b);
                ok &= rec.median.is_some_and(|m| m >= a && m <= b);
            }
            Ok(Outcome {
                status: verdict(ok),
                tolerances: tol,
                headline: Some(rec.fraction),
                message: (rec.degenerate > 0)
                    .then(|| format!("{} degenerate section trials", rec.degenerate)),
                results: to_value(&rec),
            })
        }
        CheckSpec::DistanceComparability(p) => {
            let opts = estimator_with_seed(scenario, seed);
            let rec = check_distance_comparability(x, p, &opts, seed)?;
            let ok = rec.evaluated > 0 && rec.fraction >= p.pass_fraction;
            Ok(Outcome {
                status: verdict(ok),
                tolerances: tolerances([
                    ("ratio_bound", p.ratio_bound),
                    ("growth_floor", p.growth_floor),
                    ("pass_fraction", p.pass_fraction),
                    ("min_distance", p.min_distance),
                ]),
                headline: Some(rec.fraction),
                message: (rec.skipped > 0).then(|| format!("{} trials skipped", rec.skipped)),
                results: to_value(&rec),
            })
        }
        CheckSpec::Tangency(p) => {
            let y = need_y()?;
            let opts = estimator_with_seed(scenario, seed);
            let rec = check_tangency_bound(x, y, p, &opts, fit)?;
            let status = match rec.skipped {
                Some(_) => Status::Skip,
                None => verdict(rec.passed),
            };
            Ok(Outcome {
                status,
                tolerances: tolerances([("tol", p.tol), ("jet_tolerance", p.jet_tolerance)]),
                headline: rec.nu_hat,
                message: rec.skipped.clone(),
                results: to_value(&rec),
            })
        }
        CheckSpec::Lemma1(p) => {
            let sweep = lemma1_sweep(
                &scenario.base_point_vec(),
                p.angle,
                p.configs,
                p.attempts_per_config,
                seed,
            )?;
            let (status, message) = if !sweep.counterexamples.is_empty() {
                (Status::Fail, Some(format!("{} counterexamples", sweep.counterexamples.len())))
            } else if sweep.admissible == 0 {
                (
                    Status::Skip,
                    Some(format!("no admissible configuration in {} draws", sweep.draws)),
                )
            } else if sweep.admissible < sweep.requested {
                (
                    Status::Pass,
                    Some(format!(
                        "only {} of {} admissible configurations found",
                        sweep.admissible, sweep.requested
                    )),
                )
            } else {
                (Status::Pass, None)
            };
            Ok(Outcome {
                status,
                tolerances: tolerances([("angle", p.angle), ("bound_factor", 0.9)]),
                headline: Some(sweep.counterexamples.len() as f64),
                message,
                results: to_value(&sweep),
            })
        }
        CheckSpec::ModesConsistency(p) => {
            let y = need_y()?;
            let opts = estimator_with_seed(scenario, seed);
            let rec = modes_consistency(x, y, &opts, fit, p.floor)?;
            Ok(Outcome {
                status: verdict(rec.gap <= p.gap_tolerance),
                tolerances: tolerances([("gap_tolerance", p.gap_tolerance), ("floor", p.floor)]),
                headline: Some(rec.gap),
                results: to_value(&rec),
                message: None,
            })
        }
    }
}
