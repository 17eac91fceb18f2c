use cnsm_core::CoreError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}:{line}: {message}")]
    Config { path: String, line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: malformed snapshot: {reason}")]
    Snapshot { path: PathBuf, reason: String },
    #[error(transparent)]
    Core(#[from] CoreError),
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Stable category strings with their process exit codes. Code 1 is reserved
/// for a completed run whose verdict is FAIL.
pub const EXIT_CODES: [(&str, i32); 13] = [
    ("config", 2),
    ("io", 3),
    ("snapshot", 4),
    ("invalid-input", 5),
    ("not-solenoidal", 6),
    ("linear-algebra", 7),
    ("too-large", 8),
    ("diverged", 9),
    ("not-converged", 10),
    ("invalid-bracket", 11),
    ("insufficient-data", 12),
    ("unknown-tag", 13),
    ("internal", 70),
];

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config { .. } | CliError::Invalid(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Snapshot { .. } => "snapshot",
            CliError::Core(e) => e.category(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        exit_code_for(self.category())
    }
}

pub fn exit_code_for(category: &str) -> i32 {
    EXIT_CODES.iter().find(|(c, _)| *c == category).map_or(70, |(_, code)| *code)
}
