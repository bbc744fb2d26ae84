use std::path::PathBuf;

use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),

    #[error("{0}")]
    Numeric(cascadelab::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{0}")]
    Parse(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            Self::Numeric(_) => 2,
            Self::Io { .. } | Self::Parse(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<cascadelab::Error> for CliError {
    fn from(e: cascadelab::Error) -> Self {
        use cascadelab::Error as E;
        match e {
            E::NoConvergence { .. }
            | E::LevelCap { .. }
            | E::Resolution(_)
            | E::SupportOverflow { .. }
            | E::DegenerateTheta { .. } => Self::Numeric(e),
            E::Parse(msg) => Self::Parse(msg),
            other => Self::Validation(other.to_string()),
        }
    }
}
