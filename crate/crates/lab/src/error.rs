use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("{0}")]
    BoundViolated(String),
    #[error(transparent)]
    Core(#[from] precision_core::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;

impl LabError {
    pub fn usage(msg: impl Into<String>) -> Self {
        LabError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 for a violated bound, 2 for bad input, 3 for
    /// file trouble.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::BoundViolated(_) => 1,
            LabError::Usage(_) | LabError::Core(_) => 2,
            LabError::Io { .. } | LabError::Parse { .. } => 3,
        }
    }
}
