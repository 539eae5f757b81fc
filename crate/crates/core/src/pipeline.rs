//! End-to-end runs: ensemble solve, reconstruction, residual splitting and
//! error bounds at the reporting times.

use log::{debug, info, warn};
use serde::{Deserialize, Serialize};

use crate::error::{EstimatorError, OracleError};
use crate::estimator::{
    decompose_residual, gap_sq, grad_sup_history, gronwall_integrals, initial_error, numerical_modes,
    true_error_sq, BoundConstants, BoundInputs, ErrorBoundReport, GradSupSample, ReferenceRule,
    ResidualDecomposition, StsReconstruction, GRAD_SUP_SAFETY,
};
use crate::exec::Execution;
use crate::gpc::{build_basis, build_quadrature, Family};
use crate::mesh_dg::{ContinuousPiecewisePoly, DgFunction, Mesh1D};
use crate::models::exact::{exact_solution_linear_advection, exact_solution_smooth_burgers};
use crate::models::profile::InitialProfile;
use crate::models::{build_compact_box, compute_hessian_bounds, ConservationLaw, HessianBounds, Model, StateRange};
use crate::reconstruct::{residual_norms_sq, InterfaceRule, SpaceTimeReconstruction, TimeRule};
use crate::rkdg::{project_initial, solve_ensemble, EnsembleSolution, RkdgConfig, TimePartition};
use crate::spacetime::{cumulative, SpaceTimeRule};

/// Fraction of inadmissible assembled samples above which a run fails.
pub const MAX_FLAGGED_FRACTION: f64 = 1e-3;

/// Samples of the stochastic grid for the gradient sup-norm.
pub const GRAD_SUP_GRID: usize = 64;

/// Relative aliasing-check discrepancy above which a warning is logged.
pub const ALIAS_WARN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub model: Model,
    pub profile: InitialProfile,
    pub mesh: Mesh1D,
    pub solver: RkdgConfig,
    pub family: Family,
    /// Truncation degree `M`.
    pub max_mode: usize,
    /// NISP rule order `R` (`R + 1` nodes).
    pub order: usize,
    pub ref_max_mode: usize,
    pub ref_order: usize,
    pub time_rule: TimeRule,
    pub interface_rule: InterfaceRule,
    pub t_final: f64,
    /// Requested reporting times; empty means `T/4, T/2, 3T/4, T`.
    pub report_times: Vec<f64>,
    /// Safety factor for sampled Hessian bounds.
    pub hessian_safety: f64,
    /// Recompute the cut-off term with a rule of order `2 R_ref`.
    pub alias_check: bool,
    pub exec: Execution,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub steps: usize,
    pub flagged_samples: usize,
    pub total_samples: usize,
    pub alias_discrepancy: Option<f64>,
    pub last_cutoff_norm: Option<f64>,
    pub max_pythagoras_defect: f64,
    pub oracle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentOutcome {
    pub reports: Vec<ErrorBoundReport>,
    pub decompositions: Vec<ResidualDecomposition>,
    pub hessian: HessianBounds,
    pub times: Vec<f64>,
    pub diagnostics: Diagnostics,
}

impl Experiment {
    /// Smooth Burgers defaults on `[0, 2π)` for the given profile.
    pub fn burgers(profile: InitialProfile, cells: usize, p: usize, max_mode: usize, order: usize) -> Self {
        Experiment {
            model: Model::Burgers,
            profile,
            mesh: Mesh1D::new(0.0, std::f64::consts::TAU, cells).expect("positive cell count"),
            solver: RkdgConfig::new(p),
            family: Family::UniformLegendre,
            max_mode,
            order,
            ref_max_mode: 13.max(max_mode + 1),
            ref_order: 28.max(order),
            time_rule: TimeRule::Linear,
            interface_rule: InterfaceRule::Mean,
            t_final: 1.0,
            report_times: Vec::new(),
            hessian_safety: 1.1,
            alias_check: true,
            exec: Execution::default(),
        }
    }

    pub fn validate(&self) -> Result<(), EstimatorError> {
        let bad = |s: String| Err(EstimatorError::Config(s));
        if self.profile.system_size() != self.model.system_size() {
            return bad(format!(
                "profile has {} components, model {} needs {}",
                self.profile.system_size(),
                self.model.name(),
                self.model.system_size()
            ));
        }
        if self.ref_max_mode <= self.max_mode {
            return bad(format!("M_ref = {} must exceed M = {}", self.ref_max_mode, self.max_mode));
        }
        if self.ref_order < self.order {
            return bad(format!("R_ref = {} must be at least R = {}", self.ref_order, self.order));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return bad(format!("final time must be positive, got {}", self.t_final));
        }
        if !(self.hessian_safety >= 1.0) {
            return bad(format!("Hessian safety factor must be ≥ 1, got {}", self.hessian_safety));
        }
        if let Some(t) = self.report_times.iter().find(|t| !(**t > 0.0 && **t <= self.t_final)) {
            return bad(format!("reporting time {t} outside (0, T]"));
        }
        self.solver.validate()?;
        Ok(())
    }

    fn requested_times(&self) -> Vec<f64> {
        if self.report_times.is_empty() {
            (1..=4).map(|k| self.t_final * k as f64 / 4.0).collect()
        } else {
            self.report_times.clone()
        }
    }

    fn spacetime_rule(&self) -> SpaceTimeRule {
        SpaceTimeRule::for_dg_degree(self.solver.degree)
    }

    fn initial_dg(&self, y: f64) -> DgFunction {
        project_initial(&self.model, |x, o| self.profile.eval_into(x, y, o), self.mesh, &self.solver)
    }

    fn solve(&self, ys: &[f64]) -> Result<EnsembleSolution, EstimatorError> {
        let initial = ys.iter().map(|&y| self.initial_dg(y)).collect();
        let sol = solve_ensemble(&self.model, initial, &self.solver, self.t_final, self.exec)?;
        info!(
            "{} steps on the shared partition, final dt {:.3e}",
            sol.partition.intervals(),
            sol.partition.dt(sol.partition.intervals() - 1)
        );
        Ok(sol)
    }

    fn reconstruct(&self, sol: &EnsembleSolution) -> Result<Vec<SpaceTimeReconstruction>, EstimatorError> {
        Ok(self.exec.try_map(sol.snapshots.len(), |l| {
            SpaceTimeReconstruction::build(
                &self.model,
                &sol.snapshots[l],
                &sol.partition,
                self.interface_rule,
                self.time_rule,
            )
        })?)
    }

    /// Range of the sampled reconstruction and of `u⁰` at `ys`, the box
    /// around it and its Hessian bounds.
    fn constants(&self, samples: &[GradSupSample], ys: &[f64]) -> Result<HessianBounds, EstimatorError> {
        let m = self.model.system_size();
        let mut range = StateRange::empty(m);
        for s in samples {
            range.merge(&s.range);
        }
        let rule = crate::mesh_dg::CellRule::gauss(self.solver.degree + 4);
        let mut u = vec![0.0; m];
        for &y in ys {
            for j in 0..self.mesh.cells {
                for &xi in &rule.xi {
                    self.profile.eval_into(self.mesh.x_of(j, xi), y, &mut u);
                    range.include(&u);
                }
            }
        }
        let region = build_compact_box(&self.model, &range)?;
        let tight = range.to_box()?;
        if !region.covers(&tight) {
            return Err(EstimatorError::Config("sampled states leave the admissible compact set".into()));
        }
        let hb = compute_hessian_bounds(&self.model, &region, self.hessian_safety)?;
        debug!("Hessian bounds {:?} on {:?}", (hb.c_flux, hb.eta_lower, hb.eta_upper), hb.region);
        Ok(hb)
    }

    fn report_steps(&self, partition: &TimePartition) -> Vec<usize> {
        self.requested_times().iter().map(|&t| partition.nearest(t)).collect()
    }

    /// Whether a reference solution exists for every reference node.
    fn oracle_available(&self, ys: &[f64]) -> bool {
        match self.model {
            Model::LinearAdvection { .. } => true,
            Model::Burgers => {
                self.profile.components.len() == 1
                    && ys.iter().all(|&y| {
                        crate::models::exact::burgers_shock_time(&self.profile.components[0], y) > self.t_final
                    })
            }
            Model::ShallowWater { .. } => false,
        }
    }

    fn exact(&self, t: f64, x: f64, y: f64) -> Result<Vec<f64>, OracleError> {
        match self.model {
            Model::LinearAdvection { velocity } => {
                Ok(exact_solution_linear_advection(&self.profile, velocity, t, x, y).0)
            }
            _ => Ok(exact_solution_smooth_burgers(&self.profile, t, x, y)?.0),
        }
    }

    fn norm_points(&self) -> usize {
        self.solver.degree + 3
    }

    /// Full stochastic pipeline.
    pub fn run(&self) -> Result<ExperimentOutcome, EstimatorError> {
        self.validate()?;
        let quad = build_quadrature(self.family, self.order);
        let basis = build_basis(self.family, self.max_mode);
        let reference = ReferenceRule::new(self.family, self.ref_order, self.ref_max_mode);
        let alias = self
            .alias_check
            .then(|| ReferenceRule::new(self.family, 2 * self.ref_order, self.ref_max_mode));

        let sol = self.solve(&quad.nodes)?;
        let partition = sol.partition.clone();
        let recons = self.reconstruct(&sol)?;
        let sts = StsReconstruction::new(&recons, &basis, &quad, self.max_mode)?;
        let rule = self.spacetime_rule();
        let history = decompose_residual(
            &self.model,
            &recons,
            &sts,
            &basis,
            &quad,
            &reference,
            alias.as_ref(),
            &rule,
            self.exec,
        )?;
        let last = history.at(history.steps());
        if last.flagged as f64 > MAX_FLAGGED_FRACTION * last.samples as f64 {
            return Err(EstimatorError::TooManyInadmissible {
                flagged: last.flagged,
                total: last.samples,
            });
        }
        if last.flagged > 0 {
            warn!("{} of {} assembled samples inadmissible and skipped", last.flagged, last.samples);
        }
        if let Some(d) = last.alias_discrepancy.filter(|d| *d > ALIAS_WARN) {
            warn!("reference rule may alias: cut-off term changes by {d:.2e} under a finer rule");
        }

        let grid: Vec<Vec<f64>> = self
            .family
            .dense_grid(GRAD_SUP_GRID)
            .iter()
            .map(|&y| basis.values(y))
            .collect();
        let modes: Vec<&SpaceTimeReconstruction> = sts.modes().iter().collect();
        let samples = grad_sup_history(&modes, &grid, &rule.space, self.exec);

        let deterministic_e0 = self.max_mode == 0 && self.profile.is_deterministic();
        let range_ys: Vec<f64> = if deterministic_e0 {
            vec![quad.nodes[0]]
        } else {
            reference.quad.nodes.clone()
        };
        let hessian = self.constants(&samples, &range_ys)?;
        let constants = BoundConstants::from(&hessian);
        let grad: Vec<f64> = samples.iter().map(|s| s.sup * GRAD_SUP_SAFETY).collect();
        let integrals = gronwall_integrals(&partition, &grad, &constants);

        let slices0: Vec<&ContinuousPiecewisePoly> = sts.modes().iter().map(|r| &r.slices()[0]).collect();
        let u0 = |x: f64, y: f64, o: &mut [f64]| self.profile.eval_into(x, y, o);
        let e0 = if deterministic_e0 {
            initial_error(&slices0, &[vec![1.0]], &[1.0], &range_ys, u0, self.norm_points() + 1)
        } else {
            let psi: Vec<Vec<f64>> = reference.psi.iter().map(|p| p[..=self.max_mode].to_vec()).collect();
            initial_error(&slices0, &psi, &reference.quad.weights, &reference.quad.nodes, u0, self.norm_points() + 1)
        };

        let oracle = self.oracle_available(&reference.quad.nodes);
        let mut reports = Vec::new();
        let mut decompositions = Vec::new();
        let mut max_defect = 0.0f64;
        for n in self.report_steps(&partition) {
            let decomp = history.at(n);
            let nodes: Vec<&DgFunction> = sol.snapshots.iter().map(|s| &s[n]).collect();
            let dg_modes = numerical_modes(&nodes, &basis, &quad, self.max_mode)?;
            let dg_refs: Vec<&DgFunction> = dg_modes.iter().collect();
            let rec: Vec<&ContinuousPiecewisePoly> = sts.modes().iter().map(|r| &r.slices()[n]).collect();
            let inputs = BoundInputs {
                gap: gap_sq(&rec, &dg_refs, self.norm_points()),
                residual: decomp.e_st,
                e0,
                integral: integrals[n],
                constants,
            };
            let mut report = ErrorBoundReport::new(&decomp, &inputs, &grad[..n]);
            if oracle {
                let t = partition.nodes()[n];
                let err = true_error_sq(
                    &dg_refs,
                    &basis,
                    &reference.quad,
                    |x, y| self.exact(t, x, y),
                    2 * self.solver.degree + 4,
                )?;
                report = report.with_true_error(err);
            }
            info!(
                "t = {:.4}: E_st {:.3e}, bound {:.3e}, split {:.3e}, effectivity {:?}",
                report.t, report.e_st, report.bound, report.split_bound, report.effectivity
            );
            if n > 0 {
                max_defect = max_defect.max(decomp.pythagoras_defect());
            }
            reports.push(report);
            decompositions.push(decomp);
        }
        Ok(ExperimentOutcome {
            reports,
            decompositions,
            hessian,
            times: partition.nodes().to_vec(),
            diagnostics: Diagnostics {
                steps: partition.intervals(),
                flagged_samples: last.flagged,
                total_samples: last.samples,
                alias_discrepancy: last.alias_discrepancy,
                last_cutoff_norm: last.last_cutoff_norm(),
                max_pythagoras_defect: max_defect,
                oracle,
            },
        })
    }

    /// Single-node estimator for the deterministic problem with parameter
    /// `y`; the stochastic settings are ignored.
    pub fn run_deterministic(&self, y: f64) -> Result<Vec<ErrorBoundReport>, EstimatorError> {
        self.validate()?;
        let sol = self.solve(&[y])?;
        let partition = sol.partition.clone();
        let recon = self.reconstruct(&sol)?.remove(0);
        let rule = self.spacetime_rule();
        let residual = cumulative(&residual_norms_sq(&recon, &self.model, &rule, self.exec));
        let samples = grad_sup_history(&[&recon], &[vec![1.0]], &rule.space, self.exec);
        let hessian = self.constants(&samples, &[y])?;
        let constants = BoundConstants::from(&hessian);
        let grad: Vec<f64> = samples.iter().map(|s| s.sup * GRAD_SUP_SAFETY).collect();
        let integrals = gronwall_integrals(&partition, &grad, &constants);
        let e0 = initial_error(
            &[&recon.slices()[0]],
            &[vec![1.0]],
            &[1.0],
            &[y],
            |x, y, o| self.profile.eval_into(x, y, o),
            self.norm_points() + 1,
        );
        let oracle = self.oracle_available(&[y]);
        self.report_steps(&partition)
            .into_iter()
            .map(|n| {
                let decomp = ResidualDecomposition {
                    t: partition.nodes()[n],
                    step: n,
                    det_norms: vec![residual[n].sqrt()],
                    sq_norms: vec![0.0],
                    sc_norms: Vec::new(),
                    e_det: residual[n],
                    e_sq: 0.0,
                    e_sc: 0.0,
                    e_st: residual[n],
                    e_st_ref: residual[n],
                    pythagoras_sum: residual[n],
                    alias_discrepancy: None,
                    flagged: 0,
                    samples: 0,
                };
                let u = &sol.snapshots[0][n];
                let inputs = BoundInputs {
                    gap: gap_sq(&[&recon.slices()[n]], &[u], self.norm_points()),
                    residual: residual[n],
                    e0,
                    integral: integrals[n],
                    constants,
                };
                let mut report = ErrorBoundReport::new(&decomp, &inputs, &grad[..n]);
                if oracle {
                    let t = partition.nodes()[n];
                    let basis = build_basis(self.family, 0);
                    let quad = crate::gpc::StochasticQuadrature {
                        family: self.family,
                        nodes: vec![y],
                        weights: vec![1.0],
                    };
                    let err = true_error_sq(&[u], &basis, &quad, |x, y| self.exact(t, x, y), 2 * self.solver.degree + 4)?;
                    report = report.with_true_error(err);
                }
                Ok(report)
            })
            .collect()
    }
}
