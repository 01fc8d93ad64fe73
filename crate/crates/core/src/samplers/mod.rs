//! Classical baseline samplers behind one request/read-set interface.

mod glauber;
mod pt;
mod svmc;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::model::{IsingInstance, Preparation, SpinConfig};

pub use glauber::{glauber_acceptance, glauber_sample, GlauberChain};
pub use pt::{geometric_ladder, parallel_tempering_sample, swap_acceptance, PtSettings, DEFAULT_T_MAX_RATIO};
pub use svmc::{svmc_sample, SvmcMeasurement, SvmcSettings};

pub const DEFAULT_SWEEPS: usize = 10_000;
pub const DEFAULT_SAMPLES: usize = 2_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerRequest {
    pub instance: IsingInstance,
    /// Inverse temperature multiplying `H_P` directly.
    pub beta: f64,
    pub initial: SpinConfig,
    /// Burn-in sweeps; samples follow at `max(1, sweeps / n_samples)`
    /// sweep intervals.
    pub sweeps: usize,
    pub n_samples: usize,
    pub seed: u64,
    /// Freeze the environment spins at their initial values.
    pub clamp_environment: bool,
}

impl SamplerRequest {
    pub fn new(instance: IsingInstance, beta: f64, initial: SpinConfig, sweeps: usize, n_samples: usize, seed: u64) -> Self {
        SamplerRequest { instance, beta, initial, sweeps, n_samples, seed, clamp_environment: false }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta >= 0.0) || !self.beta.is_finite() {
            return Err(Error::invalid(format!("beta must be finite and non-negative, got {}", self.beta)));
        }
        if self.sweeps == 0 {
            return Err(Error::invalid("sweeps must be at least 1"));
        }
        if self.n_samples == 0 {
            return Err(Error::invalid("n_samples must be at least 1"));
        }
        if self.initial.len() != self.instance.n {
            return Err(Error::invalid(format!(
                "initial configuration has {} spins, instance has {}",
                self.initial.len(),
                self.instance.n
            )));
        }
        Ok(())
    }

    pub fn spacing(&self) -> usize {
        (self.sweeps / self.n_samples).max(1)
    }

    /// Sites that the dynamics may update.
    pub(crate) fn movable_sites(&self) -> Vec<usize> {
        if self.clamp_environment {
            self.instance.subsystem.clone()
        } else {
            (0..self.instance.n).collect()
        }
    }

    fn echo(&self) -> Map<String, Value> {
        let mut m = Map::new();
        m.insert("beta".into(), json!(self.beta));
        m.insert("sweeps".into(), json!(self.sweeps));
        m.insert("n_samples".into(), json!(self.n_samples));
        m.insert("seed".into(), json!(self.seed));
        m.insert("clamp_environment".into(), json!(self.clamp_environment));
        m.insert("initial".into(), json!(self.initial));
        m
    }
}

/// Reads from one sampler run. Serialises with the same schema as replay
/// files, so simulated and ingested reads share one code path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadSet {
    pub instance: IsingInstance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preparation: Option<Preparation>,
    /// Qubit index of each read column.
    pub variables: Vec<usize>,
    pub reads: Vec<SpinConfig>,
    #[serde(default)]
    pub meta: Map<String, Value>,
}

impl ReadSet {
    pub(crate) fn from_request(req: &SamplerRequest, sampler: &str, reads: Vec<SpinConfig>, extra: Map<String, Value>) -> Self {
        let mut meta = req.echo();
        meta.insert("sampler".into(), json!(sampler));
        meta.extend(extra);
        ReadSet {
            instance: req.instance.clone(),
            preparation: None,
            variables: (0..req.instance.n).collect(),
            reads,
            meta,
        }
    }

    pub fn sampler(&self) -> Option<&str> {
        self.meta.get("sampler").and_then(Value::as_str)
    }

    /// Per-read subsystem indices (bit `m` = spin of `subsystem[m]`), with
    /// read columns located through `variables`.
    pub fn subsystem_indices(&self) -> Result<Vec<usize>> {
        let columns = self
            .instance
            .subsystem
            .iter()
            .map(|&q| {
                self.variables
                    .iter()
                    .position(|&v| v == q)
                    .ok_or_else(|| Error::Mapping(format!("subsystem qubit {q} missing from variables")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.reads.iter().map(|r| r.sub_index(&columns)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::InstanceParams;

    #[test]
    fn request_validation() {
        let inst = InstanceParams { n: 8, subsystem_size: 4, lambda: 0.5, disorder: 0.0, frustration: 0.0, seed: 1 }
            .generate()
            .unwrap();
        let good = SamplerRequest::new(inst.clone(), 1.0, SpinConfig::all_up(8), 10, 5, 0);
        assert!(good.validate().is_ok());
        assert_eq!(good.spacing(), 2);
        let mut bad = good.clone();
        bad.beta = -1.0;
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.sweeps = 0;
        assert!(bad.validate().is_err());
        let mut bad = good.clone();
        bad.n_samples = 0;
        assert!(bad.validate().is_err());
        let mut bad = good;
        bad.initial = SpinConfig::all_up(7);
        assert!(bad.validate().is_err());
    }
}
