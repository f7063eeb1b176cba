//! Declarative job descriptions. Every subcommand is driven by a TOML file
//! with a required `version = 1` line; unknown keys are hard errors, so a
//! config that parses is a config whose every line meant something.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::{CliError, CliResult};

pub const CONFIG_VERSION: u32 = 1;

pub fn check_version(version: u32) -> CliResult<()> {
    if version != CONFIG_VERSION {
        return Err(CliError::Validation(format!(
            "config version must be {CONFIG_VERSION} (got {version})"
        )));
    }
    Ok(())
}

/// Schedules are order lists for a family sweep; they must move forward.
pub fn check_schedule(schedule: &[usize]) -> CliResult<()> {
    if schedule.is_empty() {
        return Err(CliError::Validation("schedule must not be empty".into()));
    }
    if schedule[0] == 0 {
        return Err(CliError::Validation("schedule orders must be at least 1".into()));
    }
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Validation(format!(
            "schedule must be strictly increasing (got {schedule:?})"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// `klab run`: a convergence experiment over one operator family.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub version: u32,
    pub family: String,
    pub schedule: Vec<usize>,
    /// Which test set drives the verdicts; `auto` picks the full signed set
    /// for translatable families and the nonnegative subset otherwise.
    #[serde(default)]
    pub tests: TestsChoice,
    /// Probe functions measured alongside the test set. Either the string
    /// "builtin" / "none" or an inline `[[probes]]` list.
    #[serde(default)]
    pub probes: ProbesSpec,
    /// Echoed into the report header; the run itself is deterministic.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputFormat,
    /// Optional sanity pin: the run aborts if the family's natural domain
    /// does not match.
    #[serde(default)]
    pub domain: Option<DomainExpectation>,
    #[serde(default)]
    pub harness: HarnessSection,
    /// Per-family sampling resolutions (only keys the family understands
    /// are accepted).
    #[serde(default)]
    pub quadrature: QuadKnobs,
    /// When present, a rate-bound sweep runs after the harness and its rows
    /// are appended to the report.
    #[serde(default)]
    pub bounds: Option<BoundsSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TestsChoice {
    #[default]
    Auto,
    Euclidean,
    CircleTrig,
    Nonnegative,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ProbesSpec {
    Corpus(CorpusChoice),
    Inline(Vec<ProbeSpec>),
}

impl Default for ProbesSpec {
    fn default() -> Self {
        ProbesSpec::Corpus(CorpusChoice::Builtin)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusChoice {
    Builtin,
    None,
}

/// An inline function: coefficient list against a fixed basis in the first
/// coordinate. `polynomial` is sum_k c_k u^k; `trig` is sum_k c_k cos(k w u)
/// with w = 1 on the circle and w = 2*pi elsewhere.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProbeSpec {
    pub name: String,
    pub kind: ProbeKind,
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Polynomial,
    Trig,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DomainExpectation {
    pub kind: String,
    #[serde(default)]
    pub half_width: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct HarnessSection {
    /// Convergence threshold; defaults to the family's calibration
    /// (1e-2 for Choquet-type families, 5e-2 otherwise).
    #[serde(default)]
    pub pass_tol: Option<f64>,
    /// Evaluation grid points per axis (default: the domain's own).
    #[serde(default)]
    pub grid: Option<usize>,
    /// Grid for the squared-distance diagnostic; 0 disables it.
    #[serde(default)]
    pub hyp_grid: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    /// Must name the family itself when given; the bound registry is keyed
    /// by family.
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub grid: Option<usize>,
    /// Float slack added to the bound before calling a point a violation.
    #[serde(default)]
    pub slack: Option<f64>,
}

/// Resolution knobs, each meaningful for specific families only; setting an
/// inapplicable knob is a validation error rather than a silent no-op.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct QuadKnobs {
    /// Choquet cell samples (interval Bernstein–Kantorovich family).
    #[serde(default)]
    pub cell_samples: Option<usize>,
    /// Per-axis cell samples (planar Bernstein–Kantorovich family).
    #[serde(default)]
    pub cell_axis_samples: Option<usize>,
    /// Lattice subdivisions per cell (possibilistic families).
    #[serde(default)]
    pub subdivisions: Option<usize>,
    /// Window samples per axis (Gauss–Weierstrass family).
    #[serde(default)]
    pub axis_samples: Option<usize>,
    /// Line samples for separable evaluations (Gauss–Weierstrass family).
    #[serde(default)]
    pub line_samples: Option<usize>,
    /// Kernel tail cutoff (Gauss–Weierstrass family).
    #[serde(default)]
    pub tail_tol: Option<f64>,
}

/// `klab check`: empirical axiom matrix for one family.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub version: u32,
    pub family: String,
    pub orders: Vec<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default = "default_points_per_axis")]
    pub points_per_axis: usize,
    /// Highest oscillation of the random test functions.
    #[serde(default = "default_max_frequency")]
    pub max_frequency: f64,
    #[serde(default)]
    pub output: OutputFormat,
    #[serde(default)]
    pub quadrature: QuadKnobs,
}

fn default_trials() -> usize {
    100
}
fn default_tolerance() -> f64 {
    1e-9
}
fn default_points_per_axis() -> usize {
    3
}
fn default_max_frequency() -> f64 {
    3.0
}

/// `klab bounds`: rate-bound verification only.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub version: u32,
    pub family: String,
    pub schedule: Vec<usize>,
    #[serde(default = "default_bound_grid")]
    pub grid: usize,
    #[serde(default = "default_slack")]
    pub slack: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputFormat,
    #[serde(default)]
    pub quadrature: QuadKnobs,
}

fn default_bound_grid() -> usize {
    21
}
fn default_slack() -> f64 {
    1e-6
}

/// `klab integrate`: one Choquet integral of one function over one set.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct IntegrateConfig {
    pub version: u32,
    pub function: ProbeSpec,
    pub set: SetSpec,
    #[serde(default)]
    pub capacity: CapacitySpec,
    #[serde(default)]
    pub quadrature: IntegrateQuad,
    #[serde(default)]
    pub output: OutputFormat,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SetSpec {
    /// Disjoint closed intervals, e.g. [[0.0, 0.4], [0.6, 1.0]].
    pub intervals: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CapacitySpec {
    /// "sqrt_lebesgue" (default), "lebesgue", or "power_distortion".
    #[serde(default = "default_capacity_kind")]
    pub kind: String,
    /// Exponent for "power_distortion".
    #[serde(default)]
    pub exponent: Option<f64>,
}

impl Default for CapacitySpec {
    fn default() -> Self {
        CapacitySpec { kind: default_capacity_kind(), exponent: None }
    }
}

fn default_capacity_kind() -> String {
    "sqrt_lebesgue".into()
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Default)]
#[serde(deny_unknown_fields)]
pub struct IntegrateQuad {
    #[serde(default)]
    pub domain_samples: Option<usize>,
    #[serde(default)]
    pub level_samples: Option<usize>,
    /// "double_until_stable" (default) or "none".
    #[serde(default)]
    pub refinement: Option<String>,
    #[serde(default)]
    pub stability_tol: Option<f64>,
    #[serde(default)]
    pub max_domain_samples: Option<usize>,
}

/// Parses one TOML config, mapping serde's message to a validation error.
pub fn parse<T: serde::de::DeserializeOwned>(text: &str) -> CliResult<T> {
    toml::from_str(text).map_err(|e| CliError::Validation(format!("config: {e}")))
}
