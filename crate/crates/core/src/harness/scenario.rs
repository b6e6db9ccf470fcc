use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::cvec::{self, CVec};
use crate::error::{Error, Result};
use crate::geometry::Hyperplane;
use crate::lojasiewicz::{EstimatorOptions, FitOptions, Mode};
use crate::variety::{Form, VarietySpec};

/// A verification scenario: a pair of sets at a base point and a list of
/// checks to run on them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    pub ambient_dim: usize,
    pub base_point: Vec<[f64; 2]>,
    pub x: VarietySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<VarietySpec>,
    #[serde(default)]
    pub estimator: EstimatorOptions,
    #[serde(default)]
    pub fit: FitOptions,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

fn default_name() -> String {
    "scenario".into()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CheckSpec {
    Estimate(EstimateParams),
    SectionMonotonicity(SectionParams),
    DistanceComparability(ComparabilityParams),
    Tangency(TangencyParams),
    Lemma1(Lemma1Params),
    ModesConsistency(ModesParams),
}

/// Estimate the exponent of `(X, Y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EstimateParams {
    pub mode: Mode,
    /// Accepted interval for the estimate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<[f64; 2]>,
    pub floor: f64,
    /// Repeat the estimate once per listed seed (mixed into the check
    /// seed) and bound the spread of the results.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    pub max_spread: f64,
}

impl Default for EstimateParams {
    fn default() -> Self {
        EstimateParams {
            mode: Mode::OneSided,
            expected: None,
            floor: 0.9,
            seeds: None,
            max_spread: 0.1,
        }
    }
}

/// Sectioned estimates do not exceed the ambient one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SectionParams {
    pub trials: usize,
    pub mode: Mode,
    pub tol_section: f64,
    pub pass_fraction: f64,
    pub floor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub median_range: Option<[f64; 2]>,
}

impl Default for SectionParams {
    fn default() -> Self {
        SectionParams {
            trials: 20,
            mode: Mode::OneSided,
            tol_section: 0.2,
            pass_fraction: 0.9,
            floor: 0.9,
            median_range: None,
        }
    }
}

/// `ρ(x, X ∩ H) / ρ(x, X)` stays bounded on `H` as `x → x0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ComparabilityParams {
    pub trials: usize,
    /// Fixed hyperplane used for every trial instead of random ones.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hyperplane: Option<Hyperplane>,
    /// Defaults to the estimator's samples per shell.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_shell: Option<usize>,
    pub ratio_bound: f64,
    pub growth_floor: f64,
    pub pass_fraction: f64,
    /// Samples closer than this to `X` are excluded.
    pub min_distance: f64,
}

impl Default for ComparabilityParams {
    fn default() -> Self {
        ComparabilityParams {
            trials: 20,
            hyperplane: None,
            per_shell: None,
            ratio_bound: 3.0,
            growth_floor: -0.1,
            pass_fraction: 0.9,
            min_distance: 1e-12,
        }
    }
}

/// Order of tangency against the exponent estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TangencyParams {
    pub mode: Mode,
    pub tol: f64,
    #[serde(rename = "K")]
    pub truncation: u32,
    pub jet_tolerance: f64,
}

impl Default for TangencyParams {
    fn default() -> Self {
        TangencyParams {
            mode: Mode::OneSided,
            tol: 0.2,
            truncation: crate::algebra::DEFAULT_JET_ORDER,
            jet_tolerance: crate::tangency::JET_ZERO_TOLERANCE,
        }
    }
}

/// Random configurations for the bound `‖y1 − y0‖ ≥ 0.9·tan(a)·‖y0 − x0‖`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Lemma1Params {
    pub configs: usize,
    /// The angle threshold `a`.
    pub angle: f64,
    /// Candidate draws per requested configuration.
    pub attempts_per_config: usize,
}

impl Default for Lemma1Params {
    fn default() -> Self {
        Lemma1Params {
            configs: 500,
            angle: std::f64::consts::FRAC_PI_4,
            attempts_per_config: 100,
        }
    }
}

/// One- and two-sided estimates agree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModesParams {
    pub gap_tolerance: f64,
    pub floor: f64,
}

impl Default for ModesParams {
    fn default() -> Self {
        ModesParams {
            gap_tolerance: 0.25,
            floor: 0.9,
        }
    }
}

impl CheckSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            CheckSpec::Estimate(_) => "estimate",
            CheckSpec::SectionMonotonicity(_) => "section_monotonicity",
            CheckSpec::DistanceComparability(_) => "distance_comparability",
            CheckSpec::Tangency(_) => "tangency",
            CheckSpec::Lemma1(_) => "lemma1",
            CheckSpec::ModesConsistency(_) => "modes_consistency",
        }
    }

    fn needs_y(&self) -> bool {
        !matches!(
            self,
            CheckSpec::DistanceComparability(_) | CheckSpec::Lemma1(_)
        )
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        let s: Scenario = serde_json::from_str(text)?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn base_point_vec(&self) -> CVec {
        cvec::from_pairs(&self.base_point)
    }

    /// Checks that the sets agree with the declared dimension and base
    /// point and that every check has its inputs.
    pub fn validate(&self) -> Result<()> {
        let x0 = self.base_point_vec();
        if x0.len() != self.ambient_dim {
            return Err(Error::dim(self.ambient_dim, x0.len()));
        }
        for set in std::iter::once(&self.x).chain(self.y.as_ref()) {
            if set.ambient_dim() != self.ambient_dim {
                return Err(Error::dim(self.ambient_dim, set.ambient_dim()));
            }
            if set.base_point() != x0.as_slice() {
                return Err(Error::BasePointMismatch);
            }
        }
        for (i, c) in self.checks.iter().enumerate() {
            if c.needs_y() && self.y.is_none() {
                return Err(Error::invalid(format!(
                    "check {i} ({}) needs the set `y`",
                    c.kind()
                )));
            }
            match c {
                CheckSpec::Tangency(_) => {
                    let y = self.y.as_ref().expect("checked above");
                    match (self.x.form(), y.form()) {
                        (Form::Graph { param_dim: p, .. }, Form::Graph { param_dim: q, .. }) if p == q => {}
                        _ => {
                            return Err(Error::invalid(format!(
                                "check {i} (tangency) needs two graphs over the same parameters"
                            )))
                        }
                    }
                }
                CheckSpec::SectionMonotonicity(SectionParams { trials, .. })
                | CheckSpec::DistanceComparability(ComparabilityParams { trials, .. }) => {
                    if *trials == 0 {
                        return Err(Error::invalid(format!("check {i} needs at least one trial")));
                    }
                    if self.ambient_dim < 2 {
                        return Err(Error::invalid(format!(
                            "check {i} ({}) needs ambient dimension ≥ 2",
                            c.kind()
                        )));
                    }
                }
                CheckSpec::Lemma1(Lemma1Params { angle, .. }) => {
                    if self.ambient_dim < 2 {
                        return Err(Error::invalid(format!("check {i} (lemma1) needs ambient dimension ≥ 2")));
                    }
                    if !(*angle > 0.0 && *angle < std::f64::consts::FRAC_PI_2) {
                        return Err(Error::invalid(format!("check {i} (lemma1) needs an angle in (0, π/2)")));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
}
