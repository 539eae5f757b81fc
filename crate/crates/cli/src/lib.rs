//! Command-line runner: TOML configs in, CSV rows and JSON reports out.

use std::path::PathBuf;

use nispdg::error::EstimatorError;

pub mod app;
pub mod config;
pub mod output;
pub mod sweep;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
    /// A reference-error run where the bound fell below the measured error.
    #[error("run {run_id}: effectivity {effectivity:.3} < 1 at t = {t}")]
    Ineffective { run_id: String, t: f64, effectivity: f64 },
}

impl CliError {
    /// 1 for bad input or I/O, 2 for solver or estimator failure, 3 when a
    /// computed bound is not an upper bound.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Estimator(EstimatorError::Config(_)) => 1,
            CliError::Estimator(_) => 2,
            CliError::Ineffective { .. } => 3,
        }
    }
}
