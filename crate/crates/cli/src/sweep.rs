//! Convergence sweeps over one configuration axis.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::app::{self, RunResult};
use crate::config::RunConfig;
use crate::output::{self, ResultRow, CSV_HEADER};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    Cells,
    MaxMode,
    Order,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::Cells => "N_x",
            Axis::MaxMode => "M",
            Axis::Order => "R",
        }
    }

    /// Overwrites the swept field of an unresolved config.
    pub fn apply(self, config: &mut RunConfig, value: usize) {
        match self {
            Axis::Cells => config.mesh.cells = value,
            Axis::MaxMode => config.stochastic.max_mode = value,
            Axis::Order => config.stochastic.order = value,
        }
    }

    /// Observed order between consecutive sweep points. Mesh sweeps are
    /// normalized by the refinement ratio; truncation sweeps report the
    /// per-step decay in bits.
    pub fn order(self, (v0, e0): (usize, f64), (v1, e1): (usize, f64)) -> Option<f64> {
        if !(e0 > 0.0 && e1 > 0.0) {
            return None;
        }
        let bits = (e0 / e1).log2();
        Some(match self {
            Axis::Cells => bits / (v1 as f64 / v0 as f64).log2(),
            Axis::MaxMode | Axis::Order => bits,
        })
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "N_x" | "nx" | "cells" => Ok(Axis::Cells),
            "M" | "max_mode" => Ok(Axis::MaxMode),
            "R" | "order" => Ok(Axis::Order),
            _ => Err(format!("unknown axis `{s}` (expected N_x, M or R)")),
        }
    }
}

/// Observed orders at the final reporting time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderRow {
    pub from: usize,
    pub to: usize,
    #[serde(rename = "E_det")]
    pub e_det: Option<f64>,
    #[serde(rename = "E_sq")]
    pub e_sq: Option<f64>,
    #[serde(rename = "E_sc")]
    pub e_sc: Option<f64>,
    #[serde(rename = "E_st")]
    pub e_st: Option<f64>,
    pub bound: Option<f64>,
}

pub const ORDER_HEADER: &str = "from,to,E_det,E_sq,E_sc,E_st,bound";

pub struct SweepOutcome {
    pub axis: Axis,
    pub values: Vec<usize>,
    pub runs: Vec<RunResult>,
    pub orders: Vec<OrderRow>,
}

pub fn orders(axis: Axis, values: &[usize], finals: &[&ResultRow]) -> Vec<OrderRow> {
    let pick = |k: usize, f: fn(&ResultRow) -> f64| axis.order((values[k], f(finals[k])), (values[k + 1], f(finals[k + 1])));
    (0..finals.len().saturating_sub(1))
        .map(|k| OrderRow {
            from: values[k],
            to: values[k + 1],
            e_det: pick(k, |r| r.e_det),
            e_sq: pick(k, |r| r.e_sq),
            e_sc: pick(k, |r| r.e_sc),
            e_st: pick(k, |r| r.e_st),
            bound: pick(k, |r| r.bound),
        })
        .collect()
}

pub fn check_values(values: &[usize]) -> Result<(), CliError> {
    if values.is_empty() {
        return Err(CliError::Config("--values: at least one value required".into()));
    }
    if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
        return Err(CliError::Config(format!("--values: must be strictly increasing, got {} then {}", w[0], w[1])));
    }
    Ok(())
}

/// Runs every point concurrently on the current rayon pool. Successful runs
/// and the aggregate table are written even when another point fails; the
/// first failure in value order is then returned.
pub fn run_sweep(base: &RunConfig, stem: &str, axis: Axis, values: &[usize], dir: &Path) -> Result<SweepOutcome, CliError> {
    check_values(values)?;
    let configs = values
        .iter()
        .map(|&v| {
            let mut c = base.clone();
            axis.apply(&mut c, v);
            c.resolved().map_err(|e| match e {
                CliError::Config(msg) => CliError::Config(format!("{axis} = {v}: {msg}")),
                other => other,
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let results: Vec<Result<RunResult, CliError>> = configs
        .par_iter()
        .zip(values.par_iter())
        .map(|(c, v)| app::execute(c, &format!("{stem}_{axis}_{v}")))
        .collect();

    output::ensure_dir(dir)?;
    let mut runs = Vec::new();
    let mut kept = Vec::new();
    let mut failure = None;
    for ((result, config), &v) in results.into_iter().zip(&configs).zip(values) {
        match result {
            Ok(r) => {
                app::write_run(dir, config, &r)?;
                if failure.is_none() {
                    if let Err(e) = app::check_effectivity(&r) {
                        failure = Some(e);
                    }
                }
                kept.push(v);
                runs.push(r);
            }
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
    }

    let rows: Vec<ResultRow> = runs.iter().flat_map(|r| r.rows.iter().cloned()).collect();
    output::write_csv(&dir.join(format!("{stem}_{axis}.csv")), &rows, CSV_HEADER)?;
    let finals: Vec<&ResultRow> = runs.iter().filter_map(|r| r.rows.last()).collect();
    let orders = if finals.len() == kept.len() { orders(axis, &kept, &finals) } else { Vec::new() };
    output::write_csv(&dir.join(format!("{stem}_{axis}_orders.csv")), &orders, ORDER_HEADER)?;

    match failure {
        Some(e) => Err(e),
        None => Ok(SweepOutcome {
            axis,
            values: kept,
            runs,
            orders,
        }),
    }
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

/// Values at the final time followed by observed orders.
pub fn table(s: &SweepOutcome) -> String {
    let mut out = format!("{:>6} {:>11} {:>11} {:>11} {:>11} {:>11}\n", s.axis.label(), "E_det", "E_sq", "E_sc", "E_st", "bound");
    for (v, r) in s.values.iter().zip(&s.runs) {
        if let Some(f) = r.rows.last() {
            out += &format!(
                "{v:>6} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e} {:>11.3e}\n",
                f.e_det, f.e_sq, f.e_sc, f.e_st, f.bound
            );
        }
    }
    if !s.orders.is_empty() {
        out += "observed orders\n";
        for o in &s.orders {
            out += &format!(
                "{:>6} {:>11} {:>11} {:>11} {:>11} {:>11}\n",
                format!("{}-{}", o.from, o.to),
                cell(o.e_det),
                cell(o.e_sq),
                cell(o.e_sc),
                cell(o.e_st),
                cell(o.bound)
            );
        }
    }
    out
}
