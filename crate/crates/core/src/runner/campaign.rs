//! Campaign execution: grid expansion, per-condition runs, ordered
//! persistence and resume.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::Instant;

use serde_json::json;

use super::analysis::{analyze, AnalysisSettings};
use super::config::{hash_value, Backend, BetaSource, CampaignConfig};
use super::records::{
    read_ndjson, Appender, BetaRecord, CampaignSummary, ConditionRecord, ConditionSpec, ErrorRecord,
    InstanceSummary, LandscapeSummary, PreparationResult,
};
use crate::diagnostics::{arrhenius_factor, estimate_beta_eff, sample_probe_counts, BetaEstimate, SubsystemDistribution};
use crate::error::{Error, Result};
use crate::landscape;
use crate::model::{InstanceParams, IsingInstance, Preparation};
use crate::qsim::{
    self, lindblad::LindbladSettings, DensityMatrix, PauseHamiltonian, ScheduleSpec, ScheduleTable, StateVector,
    MAX_PAUSE_QUBITS,
};
use crate::rng;
use crate::samplers::{glauber_sample, parallel_tempering_sample, svmc_sample, ReadSet, SamplerRequest};

pub const RECORDS_FILE: &str = "records.ndjson";
pub const ERRORS_FILE: &str = "errors.ndjson";
pub const SUMMARY_FILE: &str = "summary.json";
pub const CONFIG_FILE: &str = "config.json";

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Worker threads (0 or 1 = serial).
    pub workers: usize,
    /// Skip conditions already present in the output directory.
    pub resume: bool,
    /// Stop after this many newly executed conditions.
    pub max_conditions: Option<usize>,
    /// Overrides `config.output_dir`.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct CampaignOutcome {
    pub records: Vec<ConditionRecord>,
    pub errors: Vec<ErrorRecord>,
    pub summary: CampaignSummary,
    pub executed: usize,
    pub skipped: usize,
    /// Conditions left unexecuted because of `max_conditions`.
    pub remaining: usize,
}

/// Resolved, shared state for one campaign.
pub(crate) struct Context {
    pub config: CampaignConfig,
    pub config_hash: String,
    pub schedule: ScheduleTable,
    pub beta_reference: f64,
    pub beta_estimate: Option<BetaEstimate>,
}

impl Context {
    pub fn new(config: &CampaignConfig) -> Result<Self> {
        config.validate()?;
        let schedule = config.load_schedule()?;
        let (beta_reference, beta_estimate) = match config.beta {
            BetaSource::Fixed(b) => (b, None),
            BetaSource::Probe(p) => {
                let seed = rng::derive_seed(0, "calibration", &[]);
                let counts = sample_probe_counts(p.device_beta, p.h, p.reads, p.probes, seed);
                let est = estimate_beta_eff(&counts, p.h)?;
                (est.beta, Some(est))
            }
        };
        Ok(Context { config: config.clone(), config_hash: config.hash(), schedule, beta_reference, beta_estimate })
    }

    pub fn beta_record(&self) -> BetaRecord {
        BetaRecord {
            device: self.config.beta.device_beta(),
            reference: self.beta_reference,
            estimate: self.beta_estimate.clone(),
        }
    }
}

/// Every grid point, in axis order (|E|, lambda, W, s_p, p_S, seed).
pub fn expand_conditions(config: &CampaignConfig) -> Vec<ConditionSpec> {
    let mut out = Vec::new();
    for &environment_size in &config.environment_sizes {
        for &lambda in &config.lambdas {
            for &disorder in &config.disorders {
                for &s_p in &config.pause_points {
                    for &frustration in &config.frustrations {
                        for &seed in &config.seeds {
                            out.push(ConditionSpec {
                                backend: config.backend,
                                environment_size,
                                subsystem_size: config.subsystem_size,
                                lambda,
                                disorder,
                                s_p,
                                frustration,
                                seed,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

pub fn condition_hash(config_hash: &str, spec: &ConditionSpec) -> String {
    let value = json!({ "config": config_hash, "condition": spec });
    hash_value(&value, true)
}

/// Root seed for a condition's stochastic parts; independent of the backend
/// so that different samplers see the same streams.
fn run_seed(spec: &ConditionSpec) -> u64 {
    rng::derive_seed(
        spec.seed,
        "condition",
        &[
            spec.n() as u64,
            spec.subsystem_size as u64,
            spec.lambda.to_bits(),
            spec.disorder.to_bits(),
            spec.s_p.to_bits(),
            spec.frustration.to_bits(),
        ],
    )
}

pub(crate) fn landscape_summary(instance: &IsingInstance, beta: f64, cap: usize) -> Result<Option<LandscapeSummary>> {
    if instance.n > cap.min(landscape::MAX_ENUMERATION_QUBITS) {
        return Ok(None);
    }
    let report = landscape::report(instance, None)?;
    Ok(Some(LandscapeSummary {
        n_local_minima: report.n_local_minima,
        ground_energy: report.global_minimum.energy,
        gap: report.gap,
        arrhenius_factor: report.gap.map(|g| arrhenius_factor(beta, g)),
    }))
}

fn run_condition(ctx: &Context, spec: &ConditionSpec) -> Result<ConditionRecord> {
    let started = Instant::now();
    let config = &ctx.config;
    let n = spec.n();
    if let Some(cap) = spec.backend.qubit_cap() {
        if n > cap {
            return Err(Error::Resource { what: "qubits for this backend", value: n, cap });
        }
    }
    let instance = InstanceParams {
        n,
        subsystem_size: spec.subsystem_size,
        lambda: spec.lambda,
        disorder: spec.disorder,
        frustration: spec.frustration,
        seed: spec.seed,
    }
    .generate()?;
    let root = run_seed(spec);
    let env = Preparation::new(config.s_preparations[0], config.e_preparation).environment_config(&instance, spec.seed)?;
    let schedule = ScheduleSpec::from_table(&ctx.schedule, spec.s_p, config.pause_time_us)?;
    let device_beta = config.beta.device_beta();

    let hamiltonian = match spec.backend {
        Backend::Ed | Backend::Lindblad => {
            Some(PauseHamiltonian::new(&instance, schedule.a_ghz, schedule.b_ghz, MAX_PAUSE_QUBITS)?)
        }
        _ => None,
    };

    let mut preparations = Vec::new();
    let mut raw = Vec::new();
    for &s in &config.s_preparations {
        let prep = Preparation::new(s, config.e_preparation);
        let initial = prep.initial_config(&instance, spec.seed)?;
        let seed = rng::derive_seed(root, "preparation", &[rng::label_hash(s.label())]);
        let (distribution, meta) = match spec.backend {
            Backend::Ed => {
                let h = hamiltonian.as_ref().expect("built above");
                let (psi, stats) = qsim::evolve_with(
                    h,
                    &StateVector::basis(&initial),
                    qsim::natural_time(schedule.t_p_us),
                    &config.propagation,
                )?;
                let mut meta = serde_json::Map::new();
                meta.insert("propagation".into(), json!(stats));
                (qsim::z_marginal(&psi, &instance.subsystem)?, meta)
            }
            Backend::Lindblad => {
                let h = hamiltonian.as_ref().expect("built above");
                let settings = LindbladSettings {
                    beta: qsim::bath_beta(device_beta, schedule.b_ghz),
                    gamma: config.lindblad.gamma,
                    max_rate_step: config.lindblad.max_rate_step,
                };
                let (rho, stats) = qsim::lindblad_evolve_operator(
                    h,
                    &DensityMatrix::pure(&initial),
                    &settings,
                    qsim::natural_time(schedule.t_p_us),
                )?;
                let mut meta = serde_json::Map::new();
                meta.insert("lindblad".into(), json!(stats));
                (rho.z_marginal(&instance.subsystem)?, meta)
            }
            Backend::Glauber | Backend::Svmc | Backend::Pt => {
                let req = SamplerRequest::new(instance.clone(), device_beta, initial.clone(), config.sweeps, config.reads, seed);
                let set: ReadSet = match spec.backend {
                    Backend::Glauber => glauber_sample(&req)?,
                    Backend::Svmc => svmc_sample(&req, &config.svmc)?,
                    _ => parallel_tempering_sample(&req, &config.pt)?,
                };
                let indices = set.subsystem_indices()?;
                let dist = SubsystemDistribution::from_indices(instance.subsystem.clone(), &indices)?;
                raw.push(indices);
                let mut meta = set.meta;
                for k in ["beta", "sweeps", "n_samples", "seed", "clamp_environment", "initial", "sampler"] {
                    meta.remove(k);
                }
                (dist, meta)
            }
            Backend::Replay => return Err(Error::Config("replay conditions are not grid points".into())),
        };
        preparations.push(PreparationResult { label: prep.label(), initial, distribution, meta });
    }

    let labels: Vec<String> = preparations.iter().map(|p| p.label.clone()).collect();
    let dists: Vec<SubsystemDistribution> = preparations.iter().map(|p| p.distribution.clone()).collect();
    let analysis = analyze(
        &instance,
        &env,
        &labels,
        &dists,
        if raw.is_empty() { None } else { Some(&raw) },
        &AnalysisSettings {
            beta_reference: ctx.beta_reference,
            resamples: config.bootstrap_resamples,
            bootstrap_seed: rng::derive_seed(root, "bootstrap", &[]),
            quantum: config.quantum_reference.then_some((schedule.a_ghz, schedule.b_ghz)),
            sensitivity: config.sensitivity_sweep,
        },
    )?;
    Ok(ConditionRecord {
        condition_hash: condition_hash(&ctx.config_hash, spec),
        config_hash: ctx.config_hash.clone(),
        software_version: crate::VERSION.into(),
        backend: spec.backend,
        condition: Some(spec.clone()),
        replay_condition: None,
        instance: InstanceSummary { n, subsystem: instance.subsystem.clone(), meta: instance.meta.clone() },
        environment: env,
        preparations,
        memory: analysis.memory,
        thermal: analysis.thermal,
        beta: ctx.beta_record(),
        sensitivity: analysis.sensitivity,
        landscape: landscape_summary(&instance, ctx.beta_reference, config.landscape_max_qubits)?,
        wall_time_s: started.elapsed().as_secs_f64(),
    })
}

enum Outcome {
    Record(Box<ConditionRecord>),
    Failed(ErrorRecord),
}

/// Runs a campaign. Records are written in grid order through one appender
/// regardless of the worker count; with `resume`, conditions whose hash is
/// already on disk are skipped.
pub fn run_campaign(config: &CampaignConfig, options: &RunOptions) -> Result<CampaignOutcome> {
    let ctx = Context::new(config)?;
    if config.backend == Backend::Replay {
        let jobs = super::replay::replay_jobs(&ctx)?;
        return execute(&ctx, options, jobs, |job| super::replay::run_replay_job(&ctx, job), |_| None);
    }
    let jobs = expand_conditions(config)
        .into_iter()
        .map(|c| (condition_hash(&ctx.config_hash, &c), c))
        .collect();
    execute(&ctx, options, jobs, |spec| run_condition(&ctx, spec), |spec| Some(spec.clone()))
}

/// Shared persistence and scheduling for grid and replay campaigns.
pub(crate) fn execute<T: Sync>(
    ctx: &Context,
    options: &RunOptions,
    jobs: Vec<(String, T)>,
    run: impl Fn(&T) -> Result<ConditionRecord> + Sync,
    spec_of: impl Fn(&T) -> Option<ConditionSpec> + Sync,
) -> Result<CampaignOutcome> {
    let output_dir = options.output_dir.clone().or_else(|| ctx.config.output_dir.clone());
    let (mut records, mut errors) = (Vec::new(), Vec::new());
    let mut appenders = None;
    if let Some(dir) = &output_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let records_path = dir.join(RECORDS_FILE);
        let errors_path = dir.join(ERRORS_FILE);
        if options.resume {
            records = read_ndjson::<ConditionRecord>(&records_path, true)?;
            errors = read_ndjson::<ErrorRecord>(&errors_path, true)?;
            let foreign = records
                .iter()
                .map(|r| &r.config_hash)
                .chain(errors.iter().map(|e| &e.config_hash))
                .find(|h| **h != ctx.config_hash);
            if let Some(other) = foreign {
                return Err(Error::Config(format!(
                    "{} holds results of a different campaign (config hash {other})",
                    dir.display()
                )));
            }
        } else {
            for p in [&records_path, &errors_path] {
                if p.exists() {
                    std::fs::remove_file(p).map_err(|e| Error::io(p, e))?;
                }
            }
        }
        let mut cfg = serde_json::to_string_pretty(&ctx.config)?;
        cfg.push('\n');
        let cfg_path = dir.join(CONFIG_FILE);
        std::fs::write(&cfg_path, cfg).map_err(|e| Error::io(cfg_path, e))?;
        appenders = Some((Appender::open(&records_path)?, Appender::open(&errors_path)?));
    }

    let done: HashSet<String> = records
        .iter()
        .map(|r| r.condition_hash.clone())
        .chain(errors.iter().map(|e| e.condition_hash.clone()))
        .collect();
    let mut pending: Vec<(String, T)> = jobs.into_iter().filter(|(h, _)| !done.contains(h)).collect();
    let skipped = done.len();
    let mut remaining = 0;
    if let Some(max) = options.max_conditions {
        if pending.len() > max {
            remaining = pending.len() - max;
            pending.truncate(max);
        }
    }

    let run_one = |(hash, job): &(String, T)| match run(job) {
        Ok(r) => Outcome::Record(Box::new(r)),
        Err(e) => Outcome::Failed(ErrorRecord::new(hash.clone(), ctx.config_hash.clone(), spec_of(job), &e)),
    };
    let mut sink = |outcome: Outcome| -> Result<()> {
        match outcome {
            Outcome::Record(r) => {
                if let Some((a, _)) = appenders.as_mut() {
                    a.append(&*r)?;
                }
                records.push(*r);
            }
            Outcome::Failed(e) => {
                if let Some((_, a)) = appenders.as_mut() {
                    a.append(&e)?;
                }
                errors.push(e);
            }
        }
        Ok(())
    };

    let workers = options.workers.clamp(1, pending.len().max(1));
    if workers == 1 {
        for item in &pending {
            sink(run_one(item))?;
        }
    } else {
        let next = AtomicUsize::new(0);
        let (tx, rx) = mpsc::channel::<(usize, Outcome)>();
        std::thread::scope(|scope| -> Result<()> {
            for _ in 0..workers {
                let tx = tx.clone();
                let (next, pending, run_one) = (&next, &pending, &run_one);
                scope.spawn(move || loop {
                    let i = next.fetch_add(1, Ordering::SeqCst);
                    if i >= pending.len() || tx.send((i, run_one(&pending[i]))).is_err() {
                        break;
                    }
                });
            }
            drop(tx);
            // reorder so the files follow job order
            let mut buffer = BTreeMap::new();
            let mut expected = 0;
            for (i, outcome) in rx {
                buffer.insert(i, outcome);
                while let Some(o) = buffer.remove(&expected) {
                    sink(o)?;
                    expected += 1;
                }
            }
            Ok(())
        })?;
    }

    let summary = CampaignSummary::from_records(&ctx.config_hash, &records, errors.len());
    if let Some(dir) = &output_dir {
        write_summary(dir, &summary)?;
    }
    Ok(CampaignOutcome { records, errors, summary, executed: pending.len(), skipped, remaining })
}

pub(crate) fn write_summary(dir: &Path, summary: &CampaignSummary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary)?;
    text.push('\n');
    let path = dir.join(SUMMARY_FILE);
    std::fs::write(&path, text).map_err(|e| Error::io(path, e))
}
