use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] sks_core::Error),

    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },
}

impl RunError {
    pub fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        RunError::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RunError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 I/O, 2 configuration, 3 failed checks,
    /// 4 numerical failure.
    pub fn exit_code(&self) -> i32 {
        use sks_core::Error as E;
        match self {
            RunError::Io { .. } => 1,
            RunError::Config { .. } => 2,
            RunError::ChecksFailed { .. } => 3,
            RunError::Core(E::BlowUp { .. } | E::PicardDivergence { .. } | E::Degenerate(_)) => 4,
            RunError::Core(_) => 2,
        }
    }
}
