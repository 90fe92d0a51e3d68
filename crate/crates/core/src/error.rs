use std::path::PathBuf;

use thiserror::Error;

/// Coarse failure category, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Numerical,
    Io,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config => 2,
            ErrorCategory::Numerical => 3,
            ErrorCategory::Io => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Numerical => "numerical",
            ErrorCategory::Io => "io",
        }
    }
}

#[derive(Debug, Error)]
pub enum PapError {
    #[error("invalid level system: {}", .0.join("; "))]
    InvalidSystem(Vec<String>),

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid comb: {0}")]
    InvalidComb(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("pulses overlap: event at {first:.6} ps (half-width {first_half:.6}) and event at {second:.6} ps (half-width {second_half:.6})")]
    Overlap {
        first: f64,
        first_half: f64,
        second: f64,
        second_half: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl PapError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        PapError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn category(&self) -> ErrorCategory {
        match self {
            PapError::Numerical(_) => ErrorCategory::Numerical,
            PapError::Io { .. } | PapError::Format { .. } => ErrorCategory::Io,
            _ => ErrorCategory::Config,
        }
    }
}

pub type Result<T, E = PapError> = std::result::Result<T, E>;
