//! Ingestion of externally produced read sets.
//!
//! A replay file holds read-set objects (the `ReadSet` JSON schema) as a
//! single object, an array, or one object per line. A directory is read in
//! file-name order. Objects sharing a condition key (`meta.condition` when
//! present, otherwise the instance hash) and an environment preparation form
//! one condition, with one entry per subsystem preparation.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{Map, Value};

use super::analysis::{analyze, AnalysisSettings};
use super::campaign::{landscape_summary, Context};
use super::config::{hash_value, Backend};
use super::records::{ConditionRecord, InstanceSummary, PreparationResult};
use crate::diagnostics::SubsystemDistribution;
use crate::error::{Error, Result};
use crate::model::{IsingInstance, Preparation, SpinConfig};
use crate::qsim::ScheduleSpec;
use crate::rng;
use crate::samplers::ReadSet;

/// One validated read set and where it came from.
#[derive(Debug, Clone)]
pub struct ReplayEntry {
    pub source: String,
    pub line: usize,
    pub key: String,
    pub set: ReadSet,
    pub preparation: Preparation,
    /// Prepared full configuration, from `preparation.initial` or derived.
    pub initial: SpinConfig,
}

/// Read sets of one condition, one per subsystem preparation.
#[derive(Debug, Clone)]
pub struct ReplayCondition {
    pub key: String,
    pub entries: Vec<ReplayEntry>,
}

fn parse_err(source: &str, line: usize, field: &str, message: impl Into<String>) -> Error {
    Error::Parse { source_name: source.into(), line, field: field.into(), message: message.into() }
}

fn spin_row(value: &Value, source: &str, line: usize, field: &str) -> Result<Vec<i8>> {
    let row = value.as_array().ok_or_else(|| parse_err(source, line, field, "expected an array of spins"))?;
    row.iter()
        .map(|v| {
            let x = v.as_i64().ok_or_else(|| parse_err(source, line, field, "spins must be integers"))?;
            if x == 1 || x == -1 {
                Ok(x as i8)
            } else {
                Err(Error::Validation(format!("{source}:{line}: {field} contains {x}, spins must be +1 or -1")))
            }
        })
        .collect()
}

/// Validates one replay object.
pub fn parse_replay_value(value: &Value, source: &str, line: usize) -> Result<ReplayEntry> {
    let obj = value.as_object().ok_or_else(|| parse_err(source, line, "", "expected a JSON object"))?;
    for key in obj.keys() {
        if !matches!(key.as_str(), "instance" | "preparation" | "variables" | "reads" | "meta") {
            return Err(parse_err(source, line, key, "unknown field"));
        }
    }
    let field = |name: &str| obj.get(name).ok_or_else(|| parse_err(source, line, name, "missing field"));

    let instance: IsingInstance = serde_json::from_value(field("instance")?.clone())
        .map_err(|e| parse_err(source, line, "instance", e.to_string()))?;
    instance.validate()?;
    let n = instance.n;

    let prep_value = field("preparation")?;
    let preparation: Preparation = serde_json::from_value(prep_value.clone())
        .map_err(|e| parse_err(source, line, "preparation", e.to_string()))?;

    let variables: Vec<usize> = serde_json::from_value(field("variables")?.clone())
        .map_err(|e| parse_err(source, line, "variables", e.to_string()))?;
    if variables.is_empty() {
        return Err(parse_err(source, line, "variables", "empty"));
    }
    let mut seen = vec![false; n];
    for &v in &variables {
        if v >= n {
            return Err(Error::Mapping(format!("{source}:{line}: variable {v} is not a qubit of the {n}-qubit instance")));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::Mapping(format!("{source}:{line}: variable {v} listed twice")));
        }
    }
    if let Some(&q) = instance.subsystem.iter().find(|&&q| !seen[q]) {
        return Err(Error::Mapping(format!("{source}:{line}: subsystem qubit {q} has no read column")));
    }

    let reads_value = field("reads")?.as_array().ok_or_else(|| parse_err(source, line, "reads", "expected an array"))?;
    if reads_value.is_empty() {
        return Err(parse_err(source, line, "reads", "no reads"));
    }
    let mut reads = Vec::with_capacity(reads_value.len());
    for (r, row) in reads_value.iter().enumerate() {
        let name = format!("reads[{r}]");
        let spins = spin_row(row, source, line, &name)?;
        if spins.len() != variables.len() {
            return Err(Error::Validation(format!(
                "{source}:{line}: {name} has {} entries for {} variables",
                spins.len(),
                variables.len()
            )));
        }
        reads.push(SpinConfig::new(spins)?);
    }

    let meta = match obj.get("meta") {
        None | Some(Value::Null) => Map::new(),
        Some(Value::Object(m)) => m.clone(),
        Some(_) => return Err(parse_err(source, line, "meta", "expected an object")),
    };
    let initial = match prep_value.get("initial") {
        Some(v) => {
            let spins = spin_row(v, source, line, "preparation.initial")?;
            if spins.len() != n {
                return Err(Error::Validation(format!("{source}:{line}: preparation.initial needs {n} spins")));
            }
            SpinConfig::new(spins)?
        }
        None => preparation.initial_config(&instance, instance.meta.seed)?,
    };
    let key = match meta.get("condition") {
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
        None => format!("instance-{}", &hash_value(&serde_json::to_value(&instance)?, false)[..16]),
    };
    Ok(ReplayEntry {
        source: source.into(),
        line,
        key,
        preparation,
        initial,
        set: ReadSet { instance, preparation: Some(preparation), variables, reads, meta },
    })
}

/// Parses replay text: one object, an array of objects, or a stream of
/// objects (e.g. one per line).
pub fn parse_replay_str(text: &str, source: &str) -> Result<Vec<ReplayEntry>> {
    let line_of = |offset: usize| text[..offset.min(text.len())].matches('\n').count() + 1;
    let mut out = Vec::new();
    let mut stream = serde_json::Deserializer::from_str(text).into_iter::<Value>();
    loop {
        let start = stream.byte_offset();
        let skipped = text[start..].len() - text[start..].trim_start().len();
        let value = match stream.next() {
            None => break,
            Some(Ok(v)) => v,
            Some(Err(e)) => return Err(parse_err(source, e.line(), "", format!("malformed JSON: {e}"))),
        };
        let line = line_of(start + skipped);
        match value {
            Value::Array(items) => {
                for (i, item) in items.iter().enumerate() {
                    out.push(parse_replay_value(item, source, line).map_err(|e| match e {
                        Error::Parse { source_name, line, field, message } => Error::Parse {
                            source_name,
                            line,
                            field: if field.is_empty() { format!("[{i}]") } else { format!("[{i}].{field}") },
                            message,
                        },
                        other => other,
                    })?);
                }
            }
            v => out.push(parse_replay_value(&v, source, line)?),
        }
    }
    if out.is_empty() {
        return Err(parse_err(source, 1, "", "no read sets"));
    }
    Ok(out)
}

/// Reads a replay file or every `.json`/`.ndjson` file of a directory.
pub fn ingest_replay(path: &Path) -> Result<Vec<ReplayEntry>> {
    let files: Vec<PathBuf> = if path.is_dir() {
        let mut files: Vec<PathBuf> = std::fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && matches!(p.extension().and_then(|e| e.to_str()), Some("json" | "ndjson")))
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Error::Config(format!("no replay files in {}", path.display())));
        }
        files
    } else {
        vec![path.to_path_buf()]
    };
    let mut out = Vec::new();
    for file in files {
        let text = std::fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
        out.extend(parse_replay_str(&text, &file.display().to_string())?);
    }
    Ok(out)
}

/// Groups entries by (key, environment preparation), in order of first
/// appearance.
pub fn group_replay(entries: Vec<ReplayEntry>) -> Result<Vec<ReplayCondition>> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<ReplayEntry>> = BTreeMap::new();
    for entry in entries {
        let key = format!("{}|E={}", entry.key, entry.preparation.e.label());
        let group = groups.entry(key.clone()).or_insert_with(|| {
            order.push(key.clone());
            Vec::new()
        });
        if let Some(first) = group.first() {
            if first.set.instance != entry.set.instance {
                return Err(Error::Validation(format!(
                    "{}:{}: condition `{key}` mixes different instances",
                    entry.source, entry.line
                )));
            }
            if group.iter().any(|e| e.preparation.s == entry.preparation.s) {
                return Err(Error::Validation(format!(
                    "{}:{}: condition `{key}` repeats preparation {}",
                    entry.source,
                    entry.line,
                    entry.preparation.label()
                )));
            }
        }
        group.push(entry);
    }
    Ok(order
        .into_iter()
        .map(|key| {
            let mut entries = groups.remove(&key).expect("grouped");
            entries.sort_by_key(|e| e.preparation.s);
            ReplayCondition { key, entries }
        })
        .collect())
}

pub(crate) fn replay_jobs(ctx: &Context) -> Result<Vec<(String, ReplayCondition)>> {
    let path = ctx.config.replay.as_ref().ok_or_else(|| Error::Config("no replay path".into()))?;
    let conditions = group_replay(ingest_replay(path)?)?;
    Ok(conditions
        .into_iter()
        .map(|c| {
            let hash = hash_value(&serde_json::json!({ "config": ctx.config_hash, "replay": c.key }), true);
            (hash, c)
        })
        .collect())
}

/// Runs the diagnostics on one replayed condition.
pub(crate) fn run_replay_job(ctx: &Context, condition: &ReplayCondition) -> Result<ConditionRecord> {
    let started = Instant::now();
    let first = condition.entries.first().ok_or_else(|| Error::Validation("empty condition".into()))?;
    let instance: &IsingInstance = &first.set.instance;
    let env_vertices = instance.environment();
    let env = first.initial.restrict(&env_vertices);
    for e in &condition.entries[1..] {
        if e.initial.restrict(&env_vertices) != env {
            return Err(Error::Validation(format!(
                "{}:{}: environment differs between preparations of `{}`",
                e.source, e.line, condition.key
            )));
        }
    }
    let mut preparations = Vec::new();
    let mut raw = Vec::new();
    for e in &condition.entries {
        let indices = e.set.subsystem_indices()?;
        let distribution = SubsystemDistribution::from_indices(instance.subsystem.clone(), &indices)?;
        raw.push(indices);
        preparations.push(PreparationResult {
            label: e.preparation.label(),
            initial: e.initial.clone(),
            distribution,
            meta: e.set.meta.clone(),
        });
    }
    let labels: Vec<String> = preparations.iter().map(|p| p.label.clone()).collect();
    let dists: Vec<SubsystemDistribution> = preparations.iter().map(|p| p.distribution.clone()).collect();
    let config = &ctx.config;
    let quantum = match (config.quantum_reference, config.pause_points.first()) {
        (true, Some(&s_p)) => {
            let spec = ScheduleSpec::from_table(&ctx.schedule, s_p, config.pause_time_us)?;
            Some((spec.a_ghz, spec.b_ghz))
        }
        _ => None,
    };
    let root = rng::derive_seed(0, "replay", &[rng::label_hash(&condition.key)]);
    let analysis = analyze(
        instance,
        &env,
        &labels,
        &dists,
        Some(&raw),
        &AnalysisSettings {
            beta_reference: ctx.beta_reference,
            resamples: config.bootstrap_resamples,
            bootstrap_seed: rng::derive_seed(root, "bootstrap", &[]),
            quantum,
            sensitivity: config.sensitivity_sweep,
        },
    )?;
    Ok(ConditionRecord {
        condition_hash: hash_value(&serde_json::json!({ "config": ctx.config_hash, "replay": condition.key }), true),
        config_hash: ctx.config_hash.clone(),
        software_version: crate::VERSION.into(),
        backend: Backend::Replay,
        condition: None,
        replay_condition: Some(condition.key.clone()),
        instance: InstanceSummary { n: instance.n, subsystem: instance.subsystem.clone(), meta: instance.meta.clone() },
        environment: env,
        preparations,
        memory: analysis.memory,
        thermal: analysis.thermal,
        beta: ctx.beta_record(),
        sensitivity: analysis.sensitivity,
        landscape: landscape_summary(instance, ctx.beta_reference, config.landscape_max_qubits)?,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}
