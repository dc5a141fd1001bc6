//! TOML experiment configuration, dotted-key overrides and validation.

use std::fmt;
use std::path::{Path, PathBuf};

use brokensym_core::model::{ModelSpec, MomentumGrid, QuadratureRule};
use brokensym_core::rdm::{SpinSubset, WickSettings};
use brokensym_core::wick::{Orientation, PauliString, DEFAULT_DELTA_R, DEFAULT_R, DEFAULT_THRESHOLD};
use serde::{Deserialize, Serialize};

use crate::ed::MAX_SITES;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("override `{0}` is not of the form key=value")]
    Override(String),
    #[error("override `{key}` descends into `{at}`, which is not a table")]
    OverridePath { key: String, at: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobKind {
    Distance,
    Correlators,
    TauSweep,
    OracleCompare,
    Horizon,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelConfig {
    Xy {
        gamma: f64,
        h: f64,
    },
    /// `phi` in radians.
    Cluster {
        cluster_size: u32,
        phi: f64,
    },
}

impl ModelConfig {
    pub fn to_spec(self) -> brokensym_core::Result<ModelSpec> {
        match self {
            ModelConfig::Xy { gamma, h } => ModelSpec::xy(gamma, h),
            ModelConfig::Cluster { cluster_size, phi } => ModelSpec::cluster(cluster_size, phi),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RuleConfig {
    #[default]
    Midpoint,
    GaussLegendre,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum GridConfig {
    Finite {
        n_sites: usize,
    },
    Thermodynamic {
        n_points: usize,
        #[serde(default)]
        rule: RuleConfig,
    },
}

impl GridConfig {
    pub fn to_grid(self) -> MomentumGrid {
        match self {
            GridConfig::Finite { n_sites } => MomentumGrid::Finite { n_sites },
            GridConfig::Thermodynamic { n_points, rule } => MomentumGrid::Thermodynamic {
                n_points,
                rule: match rule {
                    RuleConfig::Midpoint => QuadratureRule::Midpoint,
                    RuleConfig::GaussLegendre => QuadratureRule::GaussLegendre,
                },
            },
        }
    }

    /// Short tag for the manifest, e.g. `thermodynamic/4096/midpoint`.
    pub fn resolution(self) -> String {
        match self {
            GridConfig::Finite { n_sites } => format!("finite/{n_sites}"),
            GridConfig::Thermodynamic { n_points, rule } => {
                let r = match rule {
                    RuleConfig::Midpoint => "midpoint",
                    RuleConfig::GaussLegendre => "gauss_legendre",
                };
                format!("thermodynamic/{n_points}/{r}")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_max: f64,
    pub dt: f64,
}

impl TimeConfig {
    /// t_i = i dt for i = 0 ..= floor(t_max / dt), computed without accumulation.
    pub fn samples(&self) -> Vec<f64> {
        let n = (self.t_max / self.dt + 1e-9).floor() as usize;
        (0..=n).map(|i| i as f64 * self.dt).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    H,
    Gamma,
    Phi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_oracle_times")]
    pub times: Vec<f64>,
    /// Also report D_S on the ring against the thermodynamic pipeline.
    #[serde(default)]
    pub envelope: bool,
    /// Grid for the envelope's pipeline side.
    #[serde(default = "default_envelope_points")]
    pub envelope_points: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { times: default_oracle_times(), envelope: false, envelope_points: default_envelope_points() }
    }
}

fn default_oracle_times() -> Vec<f64> {
    vec![0.0, 0.25, 0.5, 1.0, 2.0]
}

fn default_envelope_points() -> usize {
    4096
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonConfig {
    pub r_values: Vec<usize>,
}

fn default_r() -> usize {
    DEFAULT_R
}

fn default_delta_r() -> usize {
    DEFAULT_DELTA_R
}

fn default_threshold() -> f64 {
    DEFAULT_THRESHOLD
}

fn default_l_max() -> usize {
    brokensym_core::rdm::DEFAULT_L_MAX
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_r_max() -> usize {
    20
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub job: JobKind,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every available core.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub allow_unconverged: bool,
    #[serde(rename = "R", default = "default_r")]
    pub r: usize,
    #[serde(rename = "delta_R", default = "default_delta_r")]
    pub delta_r: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_l_max")]
    pub l_max: usize,
    #[serde(default)]
    pub subsets: Vec<Vec<i64>>,
    /// Broken correlators whose R-convergence sets t*; defaults to the
    /// single-site order parameters and their z-dressed neighbours.
    #[serde(default)]
    pub tracked: Option<Vec<String>>,
    /// Table half-width for the correlator dump.
    #[serde(default = "default_r_max")]
    pub r_max: usize,
    pub model_initial: ModelConfig,
    pub model_final: ModelConfig,
    pub grid: GridConfig,
    pub time: TimeConfig,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
    #[serde(default)]
    pub horizon: Option<HorizonConfig>,
}

pub const DEFAULT_TRACKED: [&str; 4] = ["X0", "Y0", "Y0 Z1", "X0 Z1"];

/// Parses `raw` as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> toml::Value {
    match toml::from_str::<toml::Table>(&format!("v = {raw}")) {
        Ok(mut t) => t.remove("v").expect("key was just written"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

/// Applies `a.b.c=value` to a parsed document, creating tables as needed.
pub fn apply_override(doc: &mut toml::Table, spec: &str) -> Result<(), ConfigError> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| ConfigError::Override(spec.to_string()))?;
    let key = key.trim();
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(ConfigError::Override(spec.to_string()));
    }
    let mut table = doc;
    for (i, part) in parts[..parts.len() - 1].iter().enumerate() {
        let entry = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| ConfigError::OverridePath { key: key.to_string(), at: parts[..=i].join(".") })?;
    }
    table.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, overrides: &[String]) -> Result<Self, ConfigError> {
        let mut doc: toml::Table = toml::from_str(text)?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        Ok(doc.try_into()?)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_toml(&text, overrides)
    }

    pub fn wick(&self) -> WickSettings {
        WickSettings { r: self.r, delta_r: self.delta_r, threshold: self.threshold }
    }

    pub fn spin_subsets(&self) -> brokensym_core::Result<Vec<SpinSubset>> {
        self.subsets.iter().map(|s| SpinSubset::new(s.clone())).collect()
    }

    pub fn tracked_operators(&self) -> brokensym_core::Result<Vec<PauliString>> {
        match &self.tracked {
            Some(list) => list.iter().map(|s| PauliString::parse(s)).collect(),
            None => DEFAULT_TRACKED.iter().map(|s| PauliString::parse(s)).collect(),
        }
    }

    /// Every finding; the run may proceed iff none is an error.
    pub fn validate(&self) -> Vec<Violation> {
        let mut v = Findings::default();
        let t = self.time;
        if !(t.dt > 0.0 && t.dt.is_finite()) {
            v.error("time.dt", "must be positive and finite");
        }
        if !(t.t_max > 0.0 && t.t_max.is_finite()) {
            v.error("time.t_max", "must be positive and finite");
        } else if t.dt > t.t_max {
            v.error("time.dt", "exceeds time.t_max");
        }
        for t in self.oracle.iter().flat_map(|o| o.times.iter()) {
            if !(*t >= 0.0 && t.is_finite()) {
                v.error("oracle.times", format!("time {t} is not finite and non-negative"));
            }
        }

        let initial = self.model_initial.to_spec().map_err(|e| v.error("model_initial", e.to_string())).ok();
        let last = self.model_final.to_spec().map_err(|e| v.error("model_final", e.to_string())).ok();
        if let (Some(a), Some(b)) = (initial, last) {
            if a.is_cluster() != b.is_cluster() {
                v.warning("model_final", "quench across model families is experimental");
            }
            if let (
                ModelSpec::ClusterIsing { cluster_size: n0, .. },
                ModelSpec::ClusterIsing { cluster_size: n1, .. },
            ) = (a, b)
            {
                if n0 != n1 {
                    v.warning("model_final", "cluster size changes across the quench");
                }
            }
        }
        let needs_order = matches!(self.job, JobKind::Distance | JobKind::TauSweep | JobKind::Horizon);
        if let Some(a) = initial {
            if needs_order && !a.is_ordered() {
                v.error("model_initial", "initial model must lie in its ordered phase");
            }
        }

        match self.grid {
            GridConfig::Finite { n_sites } => {
                if n_sites == 0 || n_sites % 2 == 1 {
                    v.error("grid.n_sites", "must be even and positive");
                }
                if self.job == JobKind::OracleCompare && n_sites > MAX_SITES {
                    v.error("grid.n_sites", format!("exact diagonalization is capped at {MAX_SITES} sites"));
                }
            }
            GridConfig::Thermodynamic { n_points, .. } => {
                if n_points < 2 {
                    v.error("grid.n_points", "needs at least 2 points");
                }
                if self.job == JobKind::OracleCompare {
                    v.error("grid.mode", "oracle comparison needs a finite grid");
                }
            }
        }

        if !(self.threshold > 0.0) {
            v.error("threshold", "must be positive");
        }
        if self.delta_r == 0 {
            v.error("delta_R", "must be positive");
        }
        if self.l_max == 0 || self.l_max > 6 {
            v.error("l_max", "must lie in 1..=6");
        }

        let needs_subsets = matches!(self.job, JobKind::Distance | JobKind::TauSweep);
        if needs_subsets && self.subsets.is_empty() {
            v.error("subsets", "at least one subset is required");
        }
        let mut span = 0;
        for (i, s) in self.subsets.iter().enumerate() {
            match SpinSubset::new(s.clone()) {
                Err(e) => v.error(format!("subsets[{i}]"), e.to_string()),
                Ok(sub) => {
                    span = span.max(sub.span());
                    if sub.len() > self.l_max {
                        v.error(format!("subsets[{i}]"), format!("{} sites exceed l_max = {}", sub.len(), self.l_max));
                    }
                    if let Some(ModelSpec::ClusterIsing { cluster_size, .. }) = initial {
                        if sub.len() >= cluster_size as usize + 2 {
                            v.warning(
                                format!("subsets[{i}]"),
                                "subset reaches the cluster length; small-subset degeneracy no longer applies",
                            );
                        }
                    }
                }
            }
        }
        match self.tracked_operators() {
            Err(e) => v.error("tracked", e.to_string()),
            Ok(ops) => {
                for (i, op) in ops.iter().enumerate() {
                    if op.is_even() || op.is_identity() {
                        v.error(format!("tracked[{i}]"), "tracked operators must be parity-odd");
                    }
                    span = span.max(op.span());
                }
            }
        }
        let uses_r = matches!(self.job, JobKind::Distance | JobKind::TauSweep | JobKind::Horizon)
            || self.oracle.as_ref().is_some_and(|o| o.envelope);
        if uses_r {
            let mut rs = vec![("R", self.r)];
            if let (JobKind::Horizon, Some(h)) = (self.job, &self.horizon) {
                rs.extend(h.r_values.iter().map(|&r| ("horizon.r_values", r)));
            }
            for &(field, r) in &rs {
                if r <= span + 1 {
                    v.error(field, "R too small for subset span");
                }
            }
            if matches!(initial.map(|m| Orientation::for_model(&m)), Some(Orientation::Staggered(_))) {
                rs.push(("delta_R", self.delta_r));
                for &(field, r) in &rs {
                    if r % 2 == 1 {
                        v.error(field, "staggered order needs even separations");
                    }
                }
            }
            if let GridConfig::Finite { n_sites } = self.grid {
                if self.r + self.delta_r + span >= n_sites && self.job != JobKind::OracleCompare {
                    v.error("R", "R + delta_R + span must stay below the finite ring length");
                }
            }
        }

        match self.job {
            JobKind::TauSweep => match &self.sweep {
                None => v.error("sweep", "tau_sweep needs a [sweep] table"),
                Some(s) => {
                    if s.values.is_empty() {
                        v.error("sweep.values", "at least one value is required");
                    }
                    let family_ok = matches!(
                        (s.parameter, self.model_final),
                        (SweepParameter::H | SweepParameter::Gamma, ModelConfig::Xy { .. })
                            | (SweepParameter::Phi, ModelConfig::Cluster { .. })
                    );
                    if !family_ok {
                        v.error("sweep.parameter", "parameter does not belong to the final model");
                    }
                    for (i, &x) in s.values.iter().enumerate() {
                        if let Err(e) = sweep_model(self.model_final, s.parameter, x).to_spec() {
                            v.error(format!("sweep.values[{i}]"), e.to_string());
                        }
                    }
                }
            },
            JobKind::Horizon => match &self.horizon {
                Some(h) if !h.r_values.is_empty() => {}
                _ => v.error("horizon.r_values", "horizon job needs a non-empty list of R values"),
            },
            _ => {}
        }
        v.0
    }

    pub fn errors(&self) -> Vec<Violation> {
        self.validate().into_iter().filter(|v| v.severity == Severity::Error).collect()
    }
}

/// `base` with the swept parameter replaced by `value`.
pub fn sweep_model(base: ModelConfig, parameter: SweepParameter, value: f64) -> ModelConfig {
    match (base, parameter) {
        (ModelConfig::Xy { gamma, .. }, SweepParameter::H) => ModelConfig::Xy { gamma, h: value },
        (ModelConfig::Xy { h, .. }, SweepParameter::Gamma) => ModelConfig::Xy { gamma: value, h },
        (ModelConfig::Cluster { cluster_size, .. }, SweepParameter::Phi) => {
            ModelConfig::Cluster { cluster_size, phi: value }
        }
        (other, _) => other,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
    pub severity: Severity,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}: {}", self.field, self.message)
    }
}

#[derive(Default)]
struct Findings(Vec<Violation>);

impl Findings {
    fn error(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation { field: field.into(), message: message.into(), severity: Severity::Error });
    }

    fn warning(&mut self, field: impl Into<String>, message: impl Into<String>) {
        self.0.push(Violation { field: field.into(), message: message.into(), severity: Severity::Warning });
    }
}
