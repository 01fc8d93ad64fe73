use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("generation failed: {0}")]
    Generation(String),

    /// A size cap (qubits, subsystem size) was exceeded.
    #[error("resource limit: {what} = {value} exceeds cap {cap}")]
    Resource { what: &'static str, value: usize, cap: usize },

    #[error("degenerate condition: {0}")]
    DegenerateCondition(String),

    #[error("degenerate probe {probe}: zero {which} count, collect more reads")]
    DegenerateProbe { probe: usize, which: &'static str },

    #[error("integration error: {0}")]
    Integration(String),

    #[error("parse error in {source_name} at line {line}, field `{field}`: {message}")]
    Parse {
        source_name: String,
        line: usize,
        field: String,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("mapping error: {0}")]
    Mapping(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable category.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Generation(_) => "generation",
            Error::Resource { .. } => "resource",
            Error::DegenerateCondition(_) => "degenerate-condition",
            Error::DegenerateProbe { .. } => "degenerate-probe",
            Error::Integration(_) => "integration",
            Error::Parse { .. } => "parse",
            Error::Validation(_) => "validation",
            Error::Mapping(_) => "mapping",
            Error::Config(_) => "config",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
