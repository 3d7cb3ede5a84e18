//! Command line front end: scenario runs, figure presets, sweeps and the
//! Gaussian-train search.

pub mod app;
pub mod config;
pub mod output;
pub mod presets;
pub mod runner;

use thiserror::Error;

pub use app::{run_cli, Cli};
pub use config::ScenarioConfig;
pub use output::{RunRecord, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("numerical contract violated: {0}")]
    Numerical(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, err: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.as_ref().display().to_string(),
            message: err.to_string(),
        }
    }

    /// Process exit code: 2 config, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<offres_core::Error> for CliError {
    fn from(e: offres_core::Error) -> Self {
        match &e {
            offres_core::Error::NoCandidate(_) => CliError::Numerical(e.to_string()),
            e if e.is_numerical() => CliError::Numerical(e.to_string()),
            offres_core::Error::InvalidParameter { name, reason } => {
                CliError::config(name.clone(), reason.clone())
            }
            _ => CliError::config("parameters", e.to_string()),
        }
    }
}
