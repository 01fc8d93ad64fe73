use std::path::{Path, PathBuf};
use std::process::ExitCode;

use annealdiag::error::{Error, Result};
use annealdiag::landscape;
use annealdiag::model::{InstanceParams, IsingInstance};
use annealdiag::runner::{
    emit_figure_data, expand_conditions, read_ndjson, run_campaign, Backend, BetaSource, CampaignConfig,
    CampaignOutcome, ConditionRecord, FigureId, RunOptions, RECORDS_FILE,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "annealdiag", version, about = "Reverse-anneal subsystem relaxation campaigns and diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write instance JSON, either one instance from flags or every grid
    /// instance of a config.
    Generate(GenerateArgs),
    /// Run a campaign.
    Run(RunArgs),
    /// Run the diagnostics on replayed read sets.
    Diagnose(DiagnoseArgs),
    /// Enumerate an instance's energy landscape.
    Landscape(LandscapeArgs),
    /// Write figure CSVs from campaign records.
    Figures(FiguresArgs),
}

#[derive(Args)]
struct InstanceFlags {
    /// Total qubits.
    #[arg(long, default_value_t = 12)]
    n: usize,
    #[arg(long, default_value_t = 4)]
    subsystem_size: usize,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    /// Field disorder half-width W.
    #[arg(long, default_value_t = 0.0)]
    disorder: f64,
    /// Subsystem frustration probability p_S.
    #[arg(long, default_value_t = 0.0)]
    frustration: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl InstanceFlags {
    fn params(&self) -> InstanceParams {
        InstanceParams {
            n: self.n,
            subsystem_size: self.subsystem_size,
            lambda: self.lambda,
            disorder: self.disorder,
            frustration: self.frustration,
            seed: self.seed,
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    instance: InstanceFlags,
    /// Generate every instance of this campaign instead.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (single instance) or directory (with --config); stdout
    /// when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Override the config's backend.
    #[arg(long)]
    backend: Option<String>,
    /// Run this seed only.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Skip conditions already recorded in the output directory.
    #[arg(long)]
    resume: bool,
    /// Stop after this many conditions.
    #[arg(long)]
    max_conditions: Option<usize>,
}

#[derive(Args)]
struct DiagnoseArgs {
    /// Replay file or directory.
    input: PathBuf,
    /// Campaign config supplying the reference settings; its backend and
    /// replay path are replaced.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Reference inverse temperature when no config is given.
    #[arg(long, default_value_t = 7.219)]
    beta: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    resume: bool,
}

#[derive(Args)]
struct LandscapeArgs {
    /// Instance JSON; otherwise generated from the flags.
    #[arg(long)]
    instance_file: Option<PathBuf>,
    #[command(flatten)]
    instance: InstanceFlags,
    /// Also report basin weights at this inverse temperature.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FiguresArgs {
    /// records.ndjson, or a campaign output directory.
    records: PathBuf,
    /// Figure id, or `all`.
    #[arg(long, default_value = "all")]
    figure: String,
    #[arg(long)]
    out: PathBuf,
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n")).map_err(|e| Error::Io { path: path.into(), source: e }),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn generate(args: &GenerateArgs) -> Result<()> {
    let Some(config_path) = &args.config else {
        let instance = args.instance.params().generate()?;
        return write_or_print(args.out.as_deref(), &instance.to_json());
    };
    let config = CampaignConfig::from_path(config_path)?;
    let dir = args.out.clone().unwrap_or_else(|| PathBuf::from("instances"));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Io { path: dir.clone(), source: e })?;
    let mut written = 0;
    for c in expand_conditions(&config) {
        let instance = InstanceParams {
            n: c.n(),
            subsystem_size: c.subsystem_size,
            lambda: c.lambda,
            disorder: c.disorder,
            frustration: c.frustration,
            seed: c.seed,
        }
        .generate()?;
        let name = format!("n{}_l{}_W{}_p{}_seed{}.json", c.n(), c.lambda, c.disorder, c.frustration, c.seed);
        let path = dir.join(name);
        if !path.exists() {
            write_or_print(Some(&path), &instance.to_json())?;
            written += 1;
        }
    }
    eprintln!("wrote {written} instances to {}", dir.display());
    Ok(())
}

fn report(outcome: &CampaignOutcome) -> Result<()> {
    eprintln!(
        "executed {} conditions, skipped {}, {} left; {} errors",
        outcome.executed,
        outcome.skipped,
        outcome.remaining,
        outcome.errors.len()
    );
    for e in &outcome.errors {
        eprintln!("  {} [{}]: {}", &e.condition_hash[..12], e.kind, e.message);
    }
    println!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    Ok(())
}

fn run(args: &RunArgs) -> Result<()> {
    let mut config = CampaignConfig::from_path(&args.config)?;
    if let Some(b) = &args.backend {
        config.backend = Backend::parse(b)?;
    }
    if let Some(seed) = args.seed {
        config.seeds = vec![seed];
    }
    config.validate()?;
    let options = RunOptions {
        workers: args.workers,
        resume: args.resume,
        max_conditions: args.max_conditions,
        output_dir: args.out.clone(),
    };
    report(&run_campaign(&config, &options)?)
}

fn diagnose(args: &DiagnoseArgs) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => CampaignConfig::from_path(path)?,
        None => {
            let text = serde_json::json!({
                "backend": "replay",
                "beta": BetaSource::Fixed(args.beta),
                "replay": args.input,
            });
            CampaignConfig::from_json(&text.to_string())?
        }
    };
    config.backend = Backend::Replay;
    config.replay = Some(args.input.clone());
    config.validate()?;
    let options = RunOptions { workers: args.workers, resume: args.resume, max_conditions: None, output_dir: args.out.clone() };
    let outcome = run_campaign(&config, &options)?;
    for r in &outcome.records {
        eprintln!(
            "{}: M = {:.4}, D_TV = {:.4}, {}",
            r.replay_condition.as_deref().unwrap_or("?"),
            r.memory.m,
            r.thermal.d_tv_classical,
            r.classification()
        );
    }
    report(&outcome)
}

fn landscape_cmd(args: &LandscapeArgs) -> Result<()> {
    let instance = match &args.instance_file {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            IsingInstance::from_json(&text)?
        }
        None => args.instance.params().generate()?,
    };
    let report = landscape::report(&instance, args.beta)?;
    write_or_print(args.out.as_deref(), &serde_json::to_string_pretty(&report)?)
}

fn figures(args: &FiguresArgs) -> Result<()> {
    let path = if args.records.is_dir() { args.records.join(RECORDS_FILE) } else { args.records.clone() };
    let records: Vec<ConditionRecord> = read_ndjson(&path, false)?;
    let ids = if args.figure == "all" { FigureId::ALL.to_vec() } else { vec![FigureId::parse(&args.figure)?] };
    for id in ids {
        for p in emit_figure_data(&records, id, &args.out)? {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Run(a) => run(a),
        Command::Diagnose(a) => diagnose(a),
        Command::Landscape(a) => landscape_cmd(a),
        Command::Figures(a) => figures(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{}]: {e}", e.kind());
            ExitCode::FAILURE
        }
    }
}
