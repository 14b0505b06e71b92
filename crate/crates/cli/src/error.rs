use std::io;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("cannot write to {path}: {source}")]
    Io { path: PathBuf, source: io::Error },

    #[error(transparent)]
    Numerical(jcrabi_core::Error),

    #[error("acceptance failed: criteria {0:?}")]
    Acceptance(Vec<u8>),
}

impl From<jcrabi_core::Error> for CliError {
    fn from(e: jcrabi_core::Error) -> Self {
        match e {
            jcrabi_core::Error::InvalidArgument(msg) => CliError::Usage(msg),
            other => CliError::Numerical(other),
        }
    }
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
            CliError::Acceptance(_) => 3,
        }
    }
}
