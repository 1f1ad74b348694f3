use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A lag or partition node does not fall on the time grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("{system} diverged at step {step}: |rhs| = {norm:.3e} exceeds growth bound {bound:.3e}")]
    Diverged {
        system: &'static str,
        step: usize,
        norm: f64,
        bound: f64,
    },

    #[error("numerical failure: {0}")]
    Numeric(String),

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("config key `{key}`: {message}")]
    ConfigValue { key: String, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(key: &str, msg: impl Into<String>) -> Self {
        Error::ConfigValue {
            key: key.to_string(),
            message: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code used by the CLI: 1 validation, 2 divergence, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Diverged { .. } | Error::Numeric(_) => 2,
            Error::Io { .. } => 3,
            _ => 1,
        }
    }
}
