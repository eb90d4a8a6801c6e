use std::io;

use dualsat_core::Error as ModelError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("numerical failure at power point {power_index} ({p_tot_dbw} dBW), drop {drop_index}: {source}")]
    Numerical {
        power_index: usize,
        p_tot_dbw: f64,
        drop_index: usize,
        #[source]
        source: ModelError,
    },

    #[error("model error: {0}")]
    Model(#[from] ModelError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed results file: {0}")]
    Format(String),
}

impl HarnessError {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        HarnessError::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit status: 2 for configuration, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } => 2,
            HarnessError::Model(e) if !e.is_numerical() => 2,
            HarnessError::Numerical { .. } | HarnessError::Model(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
