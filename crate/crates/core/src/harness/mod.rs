//! Experiment harness: configuration, persistence, parallel execution
//! with crash-resume, and human-readable reports.

mod config;
mod manifest;
mod persist;
mod report;
mod runner;
pub mod verify;

pub use config::{config_hash, ExperimentConfig};
pub use manifest::{PerScaleCounts, RunManifest};
pub use persist::{
    read_records, read_records_tolerant, read_summary, summary_from_records, write_records,
    write_summary, SummaryRow, RECORDS_FILE, SUMMARY_FILE,
};
pub use report::{load_records_checked, render_report};
pub use runner::{run_experiment, RunOutcome};

use std::path::PathBuf;

use thiserror::Error;

use crate::estimators::EstimatorError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("config hash mismatch: file {found} vs expected {expected}")]
    HashMismatch { expected: String, found: String },
    #[error("inputs carry mixed config hashes: {0} and {1}")]
    MixedHashes(String, String),
    #[error("malformed records file {path}: {message}")]
    MalformedRecords { path: PathBuf, message: String },
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.into(),
            source,
        }
    }

    /// CLI exit code: 1 for configuration problems, 2 for runtime ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::InvalidConfig(_) => 1,
            _ => 2,
        }
    }
}
