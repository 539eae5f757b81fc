//! TOML run configuration.
//!
//! Every section rejects unknown keys. Keys accept the short names `N_x`,
//! `p`, `M`, `R`, `M_ref`, `R_ref` and `T` as aliases.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use nispdg::exec::Execution;
use nispdg::gpc::Family;
use nispdg::mesh_dg::Mesh1D;
use nispdg::models::profile::{InitialProfile, SineComponent};
use nispdg::models::{ConservationLaw, Model};
use nispdg::pipeline::Experiment;
use nispdg::reconstruct::{InterfaceRule, TimeRule};
use nispdg::rkdg::{default_cfl, default_rk_order, InitialProjection, Limiter, RkdgConfig};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Recorded in every report. All sampling grids are deterministic, so
    /// the seed does not change results.
    #[serde(default)]
    pub seed: u64,
    pub model: Model,
    #[serde(default = "default_profile")]
    pub profile: ProfileConfig,
    pub mesh: MeshConfig,
    pub solver: SolverConfig,
    pub stochastic: StochasticConfig,
    #[serde(default)]
    pub reconstruction: ReconstructionConfig,
    pub run: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub components: Vec<SineComponent>,
}

/// `1 + (0.5 + 0.1 y) sin x`.
fn default_profile() -> ProfileConfig {
    ProfileConfig {
        components: vec![SineComponent {
            offset: 1.0,
            amplitude: 0.5,
            amplitude_y: 0.1,
            ..SineComponent::constant(0.0)
        }],
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    #[serde(default)]
    pub x_min: f64,
    #[serde(default = "tau")]
    pub x_max: f64,
    #[serde(alias = "N_x")]
    pub cells: usize,
}

fn tau() -> f64 {
    TAU
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(alias = "p")]
    pub degree: usize,
    /// Defaults to `0.3/(2p+1)`.
    pub cfl: Option<f64>,
    /// Defaults to `min(p+1, 3)`.
    pub rk_order: Option<usize>,
    #[serde(default = "no_limiter")]
    pub limiter: Limiter,
    #[serde(default)]
    pub initial: InitialProjection,
}

fn no_limiter() -> Limiter {
    Limiter::None
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StochasticConfig {
    #[serde(default = "uniform")]
    pub family: Family,
    #[serde(alias = "M")]
    pub max_mode: usize,
    #[serde(alias = "R")]
    pub order: usize,
    /// Defaults to `max(13, M+1)`.
    #[serde(alias = "M_ref")]
    pub ref_max_mode: Option<usize>,
    /// Defaults to `max(28, R)`.
    #[serde(alias = "R_ref")]
    pub ref_order: Option<usize>,
}

fn uniform() -> Family {
    Family::UniformLegendre
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructionConfig {
    #[serde(default)]
    pub time_rule: TimeRule,
    #[serde(default)]
    pub interface_rule: InterfaceRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(alias = "T")]
    pub t_final: f64,
    /// Empty means `T/4, T/2, 3T/4, T`.
    #[serde(default)]
    pub report_times: Vec<f64>,
    #[serde(default = "safety")]
    pub hessian_safety: f64,
    #[serde(default = "yes")]
    pub alias_check: bool,
}

fn safety() -> f64 {
    1.1
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Used when neither `--out-dir` nor the environment variable is set.
    pub dir: Option<String>,
    /// Record wall-clock time in the CSV. Off by default so that reruns are
    /// byte-identical.
    #[serde(default)]
    pub timing: bool,
}

/// Parses, fills defaults and validates.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    parse_config_raw(text)?.resolved()
}

/// Parses without filling defaults; see [`RunConfig::resolved`].
pub fn parse_config_raw(text: &str) -> Result<RunConfig, CliError> {
    toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

impl RunConfig {
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is serializable")
    }

    /// Fills the degree- and truncation-dependent defaults, then validates.
    pub fn resolved(mut self) -> Result<RunConfig, CliError> {
        self.fill_defaults();
        self.validate()?;
        Ok(self)
    }

    fn fill_defaults(&mut self) {
        let p = self.solver.degree;
        self.solver.cfl.get_or_insert(default_cfl(p));
        self.solver.rk_order.get_or_insert(default_rk_order(p));
        let (m, r) = (self.stochastic.max_mode, self.stochastic.order);
        self.stochastic.ref_max_mode.get_or_insert(13.max(m + 1));
        self.stochastic.ref_order.get_or_insert(28.max(r));
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, msg: String| Err(CliError::Config(format!("{key}: {msg}")));
        if self.mesh.cells == 0 {
            return bad("mesh.cells", "must be at least 1".into());
        }
        if !(self.mesh.x_max > self.mesh.x_min) || !self.mesh.x_min.is_finite() || !self.mesh.x_max.is_finite() {
            return bad("mesh.x_max", format!("must exceed mesh.x_min = {}", self.mesh.x_min));
        }
        if self.solver.degree > 3 {
            return bad("solver.degree", format!("{} not supported (0..=3)", self.solver.degree));
        }
        if let Some(c) = self.solver.cfl.filter(|c| !(*c > 0.0 && c.is_finite())) {
            return bad("solver.cfl", format!("must be positive, got {c}"));
        }
        if let Some(k) = self.solver.rk_order.filter(|k| !(1..=3).contains(k)) {
            return bad("solver.rk_order", format!("{k} not tabulated (1, 2 or 3)"));
        }
        if let Limiter::TvbMinmod { m } = self.solver.limiter {
            if !(m >= 0.0) {
                return bad("solver.limiter.m", format!("must be non-negative, got {m}"));
            }
        }
        let (m, r) = (self.stochastic.max_mode, self.stochastic.order);
        if let Some(mr) = self.stochastic.ref_max_mode.filter(|mr| *mr <= m) {
            return bad("stochastic.ref_max_mode", format!("{mr} must exceed max_mode = {m}"));
        }
        if let Some(rr) = self.stochastic.ref_order.filter(|rr| *rr < r) {
            return bad("stochastic.ref_order", format!("{rr} must be at least order = {r}"));
        }
        let t = self.run.t_final;
        if !(t > 0.0 && t.is_finite()) {
            return bad("run.t_final", format!("must be positive, got {t}"));
        }
        if let Some(bad_t) = self.run.report_times.iter().find(|s| !(**s > 0.0 && **s <= t)) {
            return bad("run.report_times", format!("{bad_t} outside (0, t_final]"));
        }
        if !(self.run.hessian_safety >= 1.0) {
            return bad("run.hessian_safety", format!("must be ≥ 1, got {}", self.run.hessian_safety));
        }
        let comps = self.profile.components.len();
        if comps != self.model.system_size() {
            return bad(
                "profile.components",
                format!("{comps} given, model {} needs {}", self.model.name(), self.model.system_size()),
            );
        }
        match self.model {
            Model::LinearAdvection { velocity } if !velocity.is_finite() => {
                bad("model.velocity", format!("must be finite, got {velocity}"))
            }
            Model::ShallowWater { gravity } if !(gravity > 0.0) => {
                bad("model.gravity", format!("must be positive, got {gravity}"))
            }
            _ => Ok(()),
        }
    }

    /// The estimator experiment described by this (validated) config.
    pub fn experiment(&self) -> Experiment {
        let p = self.solver.degree;
        let (m, r) = (self.stochastic.max_mode, self.stochastic.order);
        Experiment {
            model: self.model,
            profile: InitialProfile {
                components: self.profile.components.clone(),
            },
            mesh: Mesh1D {
                x_min: self.mesh.x_min,
                x_max: self.mesh.x_max,
                cells: self.mesh.cells,
            },
            solver: RkdgConfig {
                degree: p,
                cfl: self.solver.cfl.unwrap_or(default_cfl(p)),
                rk_order: self.solver.rk_order.unwrap_or(default_rk_order(p)),
                limiter: self.solver.limiter,
                initial: self.solver.initial,
            },
            family: self.stochastic.family,
            max_mode: m,
            order: r,
            ref_max_mode: self.stochastic.ref_max_mode.unwrap_or(13.max(m + 1)),
            ref_order: self.stochastic.ref_order.unwrap_or(28.max(r)),
            time_rule: self.reconstruction.time_rule,
            interface_rule: self.reconstruction.interface_rule,
            t_final: self.run.t_final,
            report_times: self.run.report_times.clone(),
            hessian_safety: self.run.hessian_safety,
            alias_check: self.run.alias_check,
            exec: Execution::Parallel,
        }
    }
}
