//! Stochastic assembly of the numerical solution and of the reconstruction,
//! the residual decomposition and the a posteriori error bounds.

mod bound;
mod decompose;

pub use bound::{
    error_bound, error_bound_split, gap_sq, grad_sup_history, gronwall_integrals, initial_error,
    true_error_sq, BoundConstants, BoundInputs, ErrorBoundReport, GradSupSample, GRAD_SUP_SAFETY,
};
pub use decompose::{
    decompose_residual, IntervalResiduals, ReferenceRule, ResidualDecomposition, ResidualHistory,
};

use crate::error::{ModelError, ShapeError};
use crate::gpc::{projection_weights, GpcBasis, StochasticQuadrature};
use crate::mesh_dg::{C0Table, DgFunction, PiecewisePoly};
use crate::models::ConservationLaw;
use crate::reconstruct::{residual_at, SpaceTimeReconstruction};

/// NISP modes `Σ_l u(y_l) Ψ_j(y_l) w_l`, `j = 0..=M`, of DG functions.
pub fn numerical_modes(
    nodes: &[&DgFunction],
    basis: &GpcBasis,
    quad: &StochasticQuadrature,
    max_mode: usize,
) -> Result<Vec<DgFunction>, ShapeError> {
    check_nodes(nodes.len(), quad, basis, max_mode)?;
    let first = nodes[0];
    if nodes.iter().any(|u| !u.same_space(first)) {
        return Err(ShapeError::Incompatible("node solutions in different spaces".into()));
    }
    let c = projection_weights(basis, quad, max_mode);
    Ok(c.iter()
        .map(|row| {
            let mut mode = DgFunction::zeros(*first.mesh(), first.degree(), first.components());
            for (u, &w) in nodes.iter().zip(row) {
                mode.axpy(w, u);
            }
            mode
        })
        .collect())
}

fn check_nodes(
    len: usize,
    quad: &StochasticQuadrature,
    basis: &GpcBasis,
    max_mode: usize,
) -> Result<(), ShapeError> {
    if len != quad.len() {
        return Err(ShapeError::Mismatch {
            what: "quadrature nodes",
            expected: quad.len(),
            got: len,
        });
    }
    if max_mode > basis.max_degree() {
        return Err(ShapeError::Incompatible(format!(
            "mode {max_mode} exceeds basis degree {}",
            basis.max_degree()
        )));
    }
    Ok(())
}

/// `u_h^n(x, y) = Σ_i [Σ_l u_h^n(x, y_l) Ψ_i(y_l) w_l] Ψ_i(y)`, with
/// `snapshots[l][n]` as produced by the ensemble solver.
pub fn assemble_numerical_solution(
    snapshots: &[Vec<DgFunction>],
    basis: &GpcBasis,
    quad: &StochasticQuadrature,
    max_mode: usize,
    n: usize,
    x: f64,
    y: f64,
) -> Result<Vec<f64>, ShapeError> {
    let steps = snapshots.first().map_or(0, |s| s.len());
    if snapshots.iter().any(|s| s.len() != steps) || n >= steps {
        return Err(ShapeError::Incompatible(format!("no snapshot {n} on every node")));
    }
    let nodes: Vec<&DgFunction> = snapshots.iter().map(|s| &s[n]).collect();
    let modes = numerical_modes(&nodes, basis, quad, max_mode)?;
    let m = modes[0].components();
    let psi = basis.values(y);
    let mut out = vec![0.0; m];
    let mut v = vec![0.0; m];
    for (mode, &p) in modes.iter().zip(&psi) {
        mode.eval(x, &mut v);
        for c in 0..m {
            out[c] += p * v[c];
        }
    }
    Ok(out)
}

/// Reconstructed modes `û^st_j = Σ_l û^st(y_l) Ψ_j(y_l) w_l`.
pub fn reconstructed_modes(
    recons: &[SpaceTimeReconstruction],
    basis: &GpcBasis,
    quad: &StochasticQuadrature,
    max_mode: usize,
) -> Result<Vec<SpaceTimeReconstruction>, ShapeError> {
    check_nodes(recons.len(), quad, basis, max_mode)?;
    let first = &recons[0];
    if recons.iter().any(|r| !r.same_space(first)) {
        return Err(ShapeError::Incompatible("node reconstructions in different spaces".into()));
    }
    let c = projection_weights(basis, quad, max_mode);
    Ok(c.iter()
        .map(|row| {
            let parts: Vec<_> = recons.iter().zip(row).map(|(r, &w)| (r, w)).collect();
            SpaceTimeReconstruction::combination(&parts)
        })
        .collect())
}

/// `û^sts(t, x, y) = Σ_i û^st_i(t, x) Ψ_i(y)`.
#[derive(Debug, Clone)]
pub struct StsReconstruction {
    modes: Vec<SpaceTimeReconstruction>,
    basis: GpcBasis,
}

impl StsReconstruction {
    pub fn new(
        recons: &[SpaceTimeReconstruction],
        basis: &GpcBasis,
        quad: &StochasticQuadrature,
        max_mode: usize,
    ) -> Result<Self, ShapeError> {
        Ok(StsReconstruction {
            modes: reconstructed_modes(recons, basis, quad, max_mode)?,
            basis: basis.clone(),
        })
    }

    pub fn modes(&self) -> &[SpaceTimeReconstruction] {
        &self.modes
    }

    pub fn max_mode(&self) -> usize {
        self.modes.len() - 1
    }

    pub fn basis(&self) -> &GpcBasis {
        &self.basis
    }

    /// Value, x-derivative and t-derivative at `(t, x, y)`, assembled
    /// mode by mode.
    pub fn eval(&self, t: f64, x: f64, y: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = self.modes[0].components();
        let mut psi = vec![0.0; self.modes.len()];
        self.basis.eval_into(y, &mut psi);
        let (mut u, mut ux, mut ut) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        for (mode, &p) in self.modes.iter().zip(&psi) {
            let (v, vx, vt) = mode.eval(t, x);
            for c in 0..m {
                u[c] += p * v[c];
                ux[c] += p * vx[c];
                ut[c] += p * vt[c];
            }
        }
        (u, ux, ut)
    }
}

/// `R^sts = ∂_t û^sts + ∂_x F(û^sts)` at `(t, x, y)`.
pub fn sts_residual_eval<M: ConservationLaw + ?Sized>(
    sts: &StsReconstruction,
    model: &M,
    t: f64,
    x: f64,
    y: f64,
) -> Result<Vec<f64>, ModelError> {
    let (u, ux, ut) = sts.eval(t, x, y);
    model.check_admissible(&u)?;
    let m = u.len();
    let mut jac = vec![0.0; m * m];
    let mut out = vec![0.0; m];
    residual_at(model, &u, &ux, &ut, &mut jac, &mut out);
    Ok(out)
}

/// Values and x-derivatives of several functions at one table point.
pub(crate) fn eval_many(
    fns: &[&crate::mesh_dg::ContinuousPiecewisePoly],
    cell: usize,
    table: &C0Table,
    q: usize,
    m: usize,
    vals: &mut [f64],
    dx: &mut [f64],
) {
    for (i, f) in fns.iter().enumerate() {
        f.eval_table(cell, table, q, &mut vals[i * m..(i + 1) * m], &mut dx[i * m..(i + 1) * m]);
    }
}
