//! Campaign orchestration, persistence, replay ingestion and figure data.

mod analysis;
mod campaign;
mod config;
mod figures;
mod records;
mod replay;

pub use campaign::{
    condition_hash, expand_conditions, run_campaign, CampaignOutcome, RunOptions, CONFIG_FILE, ERRORS_FILE,
    RECORDS_FILE, SUMMARY_FILE,
};
pub use config::{
    Backend, BetaSource, CampaignConfig, LindbladConfig, ProbeCalibration, MAX_ED_QUBITS,
};
pub use figures::{emit_figure_data, figure_csv, FigureId, GAP_BIN_WIDTH};
pub use records::{
    read_ndjson, Appender, BetaRecord, CampaignSummary, ConditionRecord, ConditionSpec, ErrorRecord,
    InstanceSummary, LandscapeSummary, PreparationResult,
};
pub use replay::{group_replay, ingest_replay, parse_replay_str, parse_replay_value, ReplayCondition, ReplayEntry};
