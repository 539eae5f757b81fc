//! Single runs.

use std::path::Path;
use std::time::Instant;

use log::info;

use nispdg::pipeline::ExperimentOutcome;

use crate::config::RunConfig;
use crate::output::{self, ResultRow, RunReport, CSV_HEADER};
use crate::CliError;

pub struct RunResult {
    pub run_id: String,
    pub outcome: ExperimentOutcome,
    pub rows: Vec<ResultRow>,
}

/// Runs the estimator pipeline without touching the file system.
pub fn execute(config: &RunConfig, run_id: &str) -> Result<RunResult, CliError> {
    let start = Instant::now();
    let outcome = config.experiment().run()?;
    let wall_ms = config.output.timing.then(|| start.elapsed().as_millis() as u64);
    info!(
        "{run_id}: {} steps, {} of {} samples flagged",
        outcome.diagnostics.steps, outcome.diagnostics.flagged_samples, outcome.diagnostics.total_samples
    );
    let rows = output::rows(run_id, &outcome, wall_ms);
    Ok(RunResult {
        run_id: run_id.to_string(),
        outcome,
        rows,
    })
}

/// The first reporting time at which a reference error exceeds the bound.
pub fn check_effectivity(result: &RunResult) -> Result<(), CliError> {
    match result.rows.iter().find(|r| r.effectivity.is_some_and(|e| e < 1.0)) {
        Some(r) => Err(CliError::Ineffective {
            run_id: result.run_id.clone(),
            t: r.t,
            effectivity: r.effectivity.unwrap_or(f64::NAN),
        }),
        None => Ok(()),
    }
}

/// Writes `<run_id>.csv` and `<run_id>.json` into `dir`.
pub fn write_run(dir: &Path, config: &RunConfig, result: &RunResult) -> Result<(), CliError> {
    output::ensure_dir(dir)?;
    output::write_csv(&output::file_for(dir, &result.run_id, "csv"), &result.rows, CSV_HEADER)?;
    let report = RunReport {
        run_id: &result.run_id,
        seed: config.seed,
        config,
        outcome: &result.outcome,
    };
    output::write_report(&output::file_for(dir, &result.run_id, "json"), &report)
}

/// Run, write, then check effectivity so that failing runs still leave output.
pub fn run(config: &RunConfig, run_id: &str, dir: &Path) -> Result<RunResult, CliError> {
    let result = execute(config, run_id)?;
    write_run(dir, config, &result)?;
    check_effectivity(&result)?;
    Ok(result)
}
