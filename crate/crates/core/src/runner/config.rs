//! Campaign configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::diagnostics::DEFAULT_RESAMPLES;
use crate::error::{Error, Result};
use crate::model::{EPrep, SPrep};
use crate::qsim::lindblad::MAX_LINDBLAD_QUBITS;
use crate::qsim::{PropagationSettings, ScheduleTable};
use crate::samplers::{PtSettings, SvmcSettings, DEFAULT_SAMPLES, DEFAULT_SWEEPS};

/// Qubit cap for the closed-system backend.
pub const MAX_ED_QUBITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Backend {
    Ed,
    Lindblad,
    Glauber,
    Svmc,
    Pt,
    Replay,
}

impl Backend {
    pub fn label(self) -> &'static str {
        match self {
            Backend::Ed => "ed",
            Backend::Lindblad => "lindblad",
            Backend::Glauber => "glauber",
            Backend::Svmc => "svmc",
            Backend::Pt => "pt",
            Backend::Replay => "replay",
        }
    }

    pub fn parse(label: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(label.into()))
            .map_err(|_| Error::Config(format!("unknown backend `{label}`")))
    }

    /// Largest total qubit count the backend accepts.
    pub fn qubit_cap(self) -> Option<usize> {
        match self {
            Backend::Ed => Some(MAX_ED_QUBITS),
            Backend::Lindblad => Some(MAX_LINDBLAD_QUBITS),
            _ => None,
        }
    }

    /// Whether the backend produces exact distributions instead of reads.
    pub fn is_exact(self) -> bool {
        matches!(self, Backend::Ed | Backend::Lindblad)
    }
}

/// Simulated calibration: single-qubit probes read out at the device
/// temperature, from which the reference inverse temperature is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeCalibration {
    /// Inverse temperature the simulated device runs at.
    pub device_beta: f64,
    #[serde(default = "default_probe_h")]
    pub h: f64,
    /// Reads per probe.
    #[serde(default = "default_probe_reads")]
    pub reads: u64,
    #[serde(default = "default_probes")]
    pub probes: usize,
}

fn default_probe_h() -> f64 {
    0.5
}
fn default_probe_reads() -> u64 {
    10_000
}
fn default_probes() -> usize {
    3
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum BetaSource {
    /// Use this value for the samplers and the reference.
    Fixed(f64),
    /// Run samplers at `device_beta`, reference at the probe estimate.
    Probe(ProbeCalibration),
}

impl BetaSource {
    pub fn device_beta(&self) -> f64 {
        match self {
            BetaSource::Fixed(b) => *b,
            BetaSource::Probe(p) => p.device_beta,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LindbladConfig {
    /// Downhill rate per qubit, GHz.
    pub gamma: f64,
    #[serde(default = "default_rate_step")]
    pub max_rate_step: f64,
}

fn default_rate_step() -> f64 {
    0.05
}

impl Default for LindbladConfig {
    fn default() -> Self {
        LindbladConfig { gamma: 1e-3, max_rate_step: default_rate_step() }
    }
}

fn default_subsystem_size() -> usize {
    4
}
fn default_s_preps() -> Vec<SPrep> {
    SPrep::STANDARD.to_vec()
}
fn default_e_prep() -> EPrep {
    EPrep::AllUp
}
fn default_reads() -> usize {
    DEFAULT_SAMPLES
}
fn default_sweeps() -> usize {
    DEFAULT_SWEEPS
}
fn default_pause_points() -> Vec<f64> {
    vec![0.4]
}
fn default_pause_time() -> f64 {
    100.0
}
fn default_resamples() -> usize {
    DEFAULT_RESAMPLES
}
fn default_zero() -> Vec<f64> {
    vec![0.0]
}
fn default_seeds() -> Vec<u64> {
    vec![0]
}
fn default_true() -> bool {
    true
}

/// A campaign: the Cartesian product of the sweep axes, each point run
/// with every subsystem preparation and one environment preparation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    #[serde(default)]
    pub name: String,
    pub backend: Backend,
    /// `|E|` values.
    #[serde(default)]
    pub environment_sizes: Vec<usize>,
    #[serde(default = "default_subsystem_size")]
    pub subsystem_size: usize,
    #[serde(default)]
    pub lambdas: Vec<f64>,
    /// Disorder widths `W`.
    #[serde(default = "default_zero")]
    pub disorders: Vec<f64>,
    #[serde(default = "default_pause_points")]
    pub pause_points: Vec<f64>,
    /// Frustration probabilities `p_S`.
    #[serde(default = "default_zero")]
    pub frustrations: Vec<f64>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    #[serde(default = "default_s_preps")]
    pub s_preparations: Vec<SPrep>,
    #[serde(default = "default_e_prep")]
    pub e_preparation: EPrep,
    /// Reads per preparation (sampler backends).
    #[serde(default = "default_reads")]
    pub reads: usize,
    /// Burn-in sweeps (sampler backends).
    #[serde(default = "default_sweeps")]
    pub sweeps: usize,
    #[serde(default = "default_pause_time")]
    pub pause_time_us: f64,
    /// Schedule CSV; the shipped synthetic table when absent.
    #[serde(default)]
    pub schedule: Option<PathBuf>,
    pub beta: BetaSource,
    #[serde(default)]
    pub pt: PtSettings,
    #[serde(default)]
    pub svmc: SvmcSettings,
    #[serde(default)]
    pub lindblad: LindbladConfig,
    #[serde(default)]
    pub propagation: PropagationSettings,
    /// Also compare against the quantum reduced Gibbs diagonal (n <= 12).
    #[serde(default)]
    pub quantum_reference: bool,
    /// Record landscape statistics for instances up to this size.
    #[serde(default = "default_landscape_cap")]
    pub landscape_max_qubits: usize,
    #[serde(default = "default_resamples")]
    pub bootstrap_resamples: usize,
    /// Replay input (file or directory) for the `replay` backend.
    #[serde(default)]
    pub replay: Option<PathBuf>,
    #[serde(default = "default_true")]
    pub sensitivity_sweep: bool,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

fn default_landscape_cap() -> usize {
    16
}

impl CampaignConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: CampaignConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("line {}: {e}", e.line())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_json(&text)?;
        // relative paths inside the config resolve against its directory
        if let Some(dir) = path.parent() {
            for p in [&mut config.schedule, &mut config.replay].into_iter().flatten() {
                if p.is_relative() {
                    *p = dir.join(&*p);
                }
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.backend == Backend::Replay {
            if self.replay.is_none() {
                return bad("backend `replay` needs a `replay` path".into());
            }
        } else {
            for (name, len) in [
                ("environment_sizes", self.environment_sizes.len()),
                ("lambdas", self.lambdas.len()),
                ("disorders", self.disorders.len()),
                ("pause_points", self.pause_points.len()),
                ("frustrations", self.frustrations.len()),
                ("seeds", self.seeds.len()),
            ] {
                if len == 0 {
                    return bad(format!("axis `{name}` is empty"));
                }
            }
        }
        if self.subsystem_size == 0 {
            return bad("subsystem_size must be at least 1".into());
        }
        if self.s_preparations.len() < 2 {
            return bad("at least two subsystem preparations are needed for the memory order parameter".into());
        }
        let mut seen = self.s_preparations.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.s_preparations.len() {
            return bad("duplicate subsystem preparation".into());
        }
        if self.lambdas.iter().any(|l| !(0.0..=1.0).contains(l)) {
            return bad("lambda values must lie in [0, 1]".into());
        }
        if self.disorders.iter().any(|w| !(*w >= 0.0)) {
            return bad("disorder widths must be >= 0".into());
        }
        if self.frustrations.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("frustration probabilities must lie in [0, 1]".into());
        }
        if self.pause_points.iter().any(|s| !(*s > 0.0 && *s < 1.0)) {
            return bad("pause points must lie in (0, 1)".into());
        }
        if !(self.pause_time_us >= 0.0) {
            return bad("pause_time_us must be >= 0".into());
        }
        if !self.backend.is_exact() && self.backend != Backend::Replay && (self.reads == 0 || self.sweeps == 0) {
            return bad("reads and sweeps must be at least 1".into());
        }
        let beta = self.beta.device_beta();
        if !(beta > 0.0) || !beta.is_finite() {
            return bad("beta must be finite and positive".into());
        }
        if let BetaSource::Probe(p) = &self.beta {
            if p.h == 0.0 || p.reads == 0 || p.probes == 0 {
                return bad("probe calibration needs h != 0, reads >= 1, probes >= 1".into());
            }
        }
        if self.backend == Backend::Pt && self.pt.n_replicas == 0 {
            return bad("pt.n_replicas must be at least 1".into());
        }
        Ok(())
    }

    /// The schedule table; a missing file is a startup error.
    pub fn load_schedule(&self) -> Result<ScheduleTable> {
        match &self.schedule {
            None => Ok(ScheduleTable::synthetic()),
            Some(path) => {
                if !path.exists() {
                    return Err(Error::Config(format!("schedule file {} not found", path.display())));
                }
                ScheduleTable::from_path(path)
            }
        }
    }

    /// SHA-256 over the canonical JSON of the config and the software
    /// version.
    pub fn hash(&self) -> String {
        let mut value = serde_json::to_value(self).expect("config serialises");
        // where results are written does not change them
        if let Some(obj) = value.as_object_mut() {
            obj.remove("output_dir");
        }
        hash_value(&value, true)
    }
}

/// Hex SHA-256 of canonical (sorted-key) JSON, optionally salted with the
/// crate version.
pub(crate) fn hash_value(value: &serde_json::Value, with_version: bool) -> String {
    let mut hasher = Sha256::new();
    if with_version {
        hasher.update(crate::VERSION.as_bytes());
        hasher.update([0u8]);
    }
    hasher.update(canonical_json(value).as_bytes());
    hex::encode(hasher.finalize())
}

/// JSON with object keys sorted at every level.
pub(crate) fn canonical_json(value: &serde_json::Value) -> String {
    use serde_json::Value;
    fn sorted(v: &Value) -> Value {
        match v {
            Value::Object(map) => {
                let mut keys: Vec<_> = map.keys().collect();
                keys.sort();
                let mut out = serde_json::Map::new();
                for k in keys {
                    out.insert(k.clone(), sorted(&map[k]));
                }
                Value::Object(out)
            }
            Value::Array(items) => Value::Array(items.iter().map(sorted).collect()),
            other => other.clone(),
        }
    }
    serde_json::to_string(&sorted(value)).expect("json value serialises")
}
