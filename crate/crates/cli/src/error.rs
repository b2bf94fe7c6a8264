use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CHECKS_FAILED: i32 = 1;
    pub const SOLVER: i32 = 2;
    pub const CONFIG: i32 = 3;
    pub const IO: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: &'static str, reason: String },
    #[error(transparent)]
    Core(#[from] fracwave_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed archive: {source}")]
    Archive {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("unsupported archive version {0:?} (expected \"1\")")]
    ArchiveVersion(String),
}

impl CliError {
    pub fn config(field: &'static str, reason: impl Into<String>) -> Self {
        CliError::Config {
            field,
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for solver failures, 3 for rejected parameters, 4 for file problems.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => exit::CONFIG,
            CliError::Core(e) => match e {
                fracwave_core::Error::InvalidParameter { .. } | fracwave_core::Error::ModulusOutOfRange { .. } => {
                    exit::CONFIG
                }
                _ => exit::SOLVER,
            },
            CliError::Io { .. } | CliError::Archive { .. } | CliError::ArchiveVersion(_) => exit::IO,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
