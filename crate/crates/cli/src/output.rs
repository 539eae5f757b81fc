//! CSV rows and JSON reports.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use nispdg::pipeline::ExperimentOutcome;

use crate::config::RunConfig;
use crate::CliError;

pub const CSV_HEADER: &str = "run_id,t,E_det,E_sq,E_sc,E_st,E0,bound,split_bound,true_error,effectivity,wall_ms";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub run_id: String,
    pub t: f64,
    #[serde(rename = "E_det")]
    pub e_det: f64,
    #[serde(rename = "E_sq")]
    pub e_sq: f64,
    #[serde(rename = "E_sc")]
    pub e_sc: f64,
    #[serde(rename = "E_st")]
    pub e_st: f64,
    #[serde(rename = "E0")]
    pub e0: f64,
    pub bound: f64,
    pub split_bound: f64,
    pub true_error: Option<f64>,
    pub effectivity: Option<f64>,
    pub wall_ms: Option<u64>,
}

/// One row per reporting time; every row carries the run's total wall time.
pub fn rows(run_id: &str, outcome: &ExperimentOutcome, wall_ms: Option<u64>) -> Vec<ResultRow> {
    outcome
        .reports
        .iter()
        .map(|r| ResultRow {
            run_id: run_id.to_string(),
            t: r.t,
            e_det: r.e_det,
            e_sq: r.e_sq,
            e_sc: r.e_sc,
            e_st: r.e_st,
            e0: r.e0,
            bound: r.bound,
            split_bound: r.split_bound,
            true_error: r.true_error,
            effectivity: r.effectivity,
            wall_ms,
        })
        .collect()
}

/// Everything known about one run.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport<'a> {
    pub run_id: &'a str,
    pub seed: u64,
    pub config: &'a RunConfig,
    #[serde(flatten)]
    pub outcome: &'a ExperimentOutcome,
}

fn io_err(path: &Path, source: std::io::Error) -> CliError {
    CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))
}

pub fn write_csv<T: Serialize>(path: &Path, items: &[T], header: &str) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for item in items {
        w.serialize(item).map_err(|e| CliError::Config(format!("csv serialization: {e}")))?;
    }
    let body = w.into_inner().map_err(|e| io_err(path, e.into_error()))?;
    let mut text = format!("{header}\n").into_bytes();
    text.extend_from_slice(&body);
    fs::write(path, text).map_err(|e| io_err(path, e))
}

pub fn write_report(path: &Path, report: &RunReport) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(report).expect("reports are serializable");
    fs::write(path, text + "\n").map_err(|e| io_err(path, e))
}

/// `<dir>/<run_id>.<ext>`.
pub fn file_for(dir: &Path, run_id: &str, ext: &str) -> PathBuf {
    dir.join(format!("{run_id}.{ext}"))
}
