//! Condition records and their newline-delimited JSON files.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::config::Backend;
use crate::diagnostics::{
    BetaEstimate, Classification, MemoryResult, SensitivityPoint, SubsystemDistribution, ThermalComparison,
};
use crate::error::{Error, Result};
use crate::model::{InstanceMeta, SpinConfig};

/// One grid point of a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionSpec {
    pub backend: Backend,
    pub environment_size: usize,
    pub subsystem_size: usize,
    pub lambda: f64,
    #[serde(rename = "W")]
    pub disorder: f64,
    pub s_p: f64,
    #[serde(rename = "p_S")]
    pub frustration: f64,
    pub seed: u64,
}

impl ConditionSpec {
    pub fn n(&self) -> usize {
        self.environment_size + self.subsystem_size
    }
}

/// Enough of the instance to regenerate it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub n: usize,
    pub subsystem: Vec<usize>,
    pub meta: InstanceMeta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreparationResult {
    pub label: String,
    pub initial: SpinConfig,
    pub distribution: SubsystemDistribution,
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub meta: Map<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaRecord {
    /// Temperature the samplers (or bath) ran at.
    pub device: f64,
    /// Temperature of the conditional reference.
    pub reference: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimate: Option<BetaEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeSummary {
    pub n_local_minima: usize,
    pub ground_energy: f64,
    #[serde(default)]
    pub gap: Option<f64>,
    #[serde(default)]
    pub arrhenius_factor: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionRecord {
    pub condition_hash: String,
    pub config_hash: String,
    pub software_version: String,
    pub backend: Backend,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionSpec>,
    /// Replay key, for ingested data.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replay_condition: Option<String>,
    pub instance: InstanceSummary,
    /// Prepared environment spins, in ascending vertex order.
    pub environment: SpinConfig,
    pub preparations: Vec<PreparationResult>,
    pub memory: MemoryResult,
    pub thermal: ThermalComparison,
    pub beta: BetaRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity: Option<Vec<SensitivityPoint>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landscape: Option<LandscapeSummary>,
    /// Excluded from determinism comparisons.
    pub wall_time_s: f64,
}

impl ConditionRecord {
    pub fn classification(&self) -> Classification {
        self.thermal.classification
    }

    /// Serialised line with the wall time zeroed, for comparisons.
    pub fn without_wall_time(&self) -> String {
        let mut r = self.clone();
        r.wall_time_s = 0.0;
        serde_json::to_string(&r).expect("record serialises")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub condition_hash: String,
    pub config_hash: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionSpec>,
    pub kind: String,
    pub message: String,
}

impl ErrorRecord {
    pub fn new(condition_hash: String, config_hash: String, condition: Option<ConditionSpec>, error: &Error) -> Self {
        ErrorRecord { condition_hash, config_hash, condition, kind: error.kind().into(), message: error.to_string() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignSummary {
    pub config_hash: String,
    pub software_version: String,
    pub records: usize,
    pub errors: usize,
    pub classification_counts: BTreeMap<String, usize>,
    pub relaxed_fraction: Option<f64>,
    pub mean_m: Option<f64>,
}

impl CampaignSummary {
    pub fn from_records(config_hash: &str, records: &[ConditionRecord], errors: usize) -> Self {
        let mut counts: BTreeMap<String, usize> =
            Classification::ALL.iter().map(|c| (c.label().to_string(), 0)).collect();
        for r in records {
            *counts.entry(r.classification().label().into()).or_default() += 1;
        }
        let n = records.len();
        let relaxed = records.iter().filter(|r| r.classification().is_relaxed()).count();
        CampaignSummary {
            config_hash: config_hash.into(),
            software_version: crate::VERSION.into(),
            records: n,
            errors,
            classification_counts: counts,
            relaxed_fraction: (n > 0).then(|| relaxed as f64 / n as f64),
            mean_m: (n > 0).then(|| records.iter().map(|r| r.memory.m).sum::<f64>() / n as f64),
        }
    }
}

/// Reads an NDJSON file written by [`Appender`]. A final line without a
/// newline is an interrupted write: it is ignored and, when `repair` is
/// set, truncated away.
pub fn read_ndjson<T: serde::de::DeserializeOwned>(path: &Path, repair: bool) -> Result<Vec<T>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let complete = match bytes.iter().rposition(|&b| b == b'\n') {
        Some(pos) => pos + 1,
        None => 0,
    };
    if complete < bytes.len() && repair {
        let file = OpenOptions::new().write(true).open(path).map_err(|e| Error::io(path, e))?;
        file.set_len(complete as u64).map_err(|e| Error::io(path, e))?;
    }
    let reader = BufReader::new(&bytes[..complete]);
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            source_name: path.display().to_string(),
            line: k + 1,
            field: "record".into(),
            message: e.to_string(),
        })?);
    }
    Ok(out)
}

/// Single writer for an NDJSON file; each record is one flushed line.
pub struct Appender {
    file: File,
    path: std::path::PathBuf,
}

impl Appender {
    pub fn open(path: &Path) -> Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path).map_err(|e| Error::io(path, e))?;
        Ok(Appender { file, path: path.to_path_buf() })
    }

    pub fn append<T: Serialize>(&mut self, record: &T) -> Result<()> {
        let mut line = serde_json::to_string(record)?;
        line.push('\n');
        self.file.write_all(line.as_bytes()).map_err(|e| Error::io(&self.path, e))?;
        self.file.flush().map_err(|e| Error::io(&self.path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torn_last_line_is_dropped_and_repaired() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.ndjson");
        std::fs::write(&path, "{\"a\":1}\n{\"a\":2}\n{\"a\":").unwrap();
        let v: Vec<Value> = read_ndjson(&path, true).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "{\"a\":1}\n{\"a\":2}\n");
        let mut app = Appender::open(&path).unwrap();
        app.append(&serde_json::json!({"a": 3})).unwrap();
        let v: Vec<Value> = read_ndjson(&path, false).unwrap();
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn corrupt_complete_line_is_a_parse_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.ndjson");
        std::fs::write(&path, "{\"a\":1}\nnot json\n").unwrap();
        assert!(matches!(read_ndjson::<Value>(&path, false), Err(Error::Parse { line: 2, .. })));
    }
}
