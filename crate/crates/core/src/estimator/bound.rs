//! Initial error, sampled gradient sup-norms and the Gronwall-type bounds.

use serde::{Deserialize, Serialize};

use super::ResidualDecomposition;
use crate::exec::Execution;
use crate::gpc::{GpcBasis, StochasticQuadrature};
use crate::mesh_dg::{C0Table, CellRule, ContinuousPiecewisePoly, DgFunction, DgTable, PiecewisePoly};
use crate::models::{HessianBounds, StateRange};
use crate::reconstruct::SpaceTimeReconstruction;
use crate::rkdg::TimePartition;

/// Applied to the sampled gradient maximum.
pub const GRAD_SUP_SAFETY: f64 = 1.05;

/// Time samples per interval for the gradient sup-norm.
const GRAD_THETAS: [f64; 3] = [0.0, 0.5, 1.0];

/// `Σ_i psi_i f_i` and its x-derivative at one table point.
fn combine_at(
    fs: &[&ContinuousPiecewisePoly],
    psi: &[f64],
    cell: usize,
    table: &C0Table,
    q: usize,
    vals: &mut [f64],
    dxs: &mut [f64],
    u: &mut [f64],
    ux: &mut [f64],
) {
    let m = u.len();
    super::eval_many(fs, cell, table, q, m, vals, dxs);
    u.fill(0.0);
    ux.fill(0.0);
    for (i, &p) in psi.iter().enumerate() {
        for c in 0..m {
            u[c] += p * vals[i * m + c];
            ux[c] += p * dxs[i * m + c];
        }
    }
}

/// `‖u⁰ − Σ_i psi[r][i] R_i‖²` integrated against the stochastic weights
/// `weights[r]` at parameters `ys[r]`, with `points` Gauss points per cell.
pub fn initial_error(
    slices: &[&ContinuousPiecewisePoly],
    psi: &[Vec<f64>],
    weights: &[f64],
    ys: &[f64],
    u0: impl Fn(f64, f64, &mut [f64]),
    points: usize,
) -> f64 {
    let first = slices[0];
    let (mesh, m) = (*first.mesh(), first.components());
    let rule = CellRule::gauss(points);
    let table = C0Table::new(first.degree(), &rule.xi);
    let n = slices.len();
    let (mut vals, mut dxs) = (vec![0.0; n * m], vec![0.0; n * m]);
    let (mut u, mut ux, mut g) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let h = mesh.h();
    let mut total = 0.0;
    for ((p, &w), &y) in psi.iter().zip(weights).zip(ys) {
        let mut s = 0.0;
        for cell in 0..mesh.cells {
            for (q, (&xi, &wq)) in rule.xi.iter().zip(&rule.w).enumerate() {
                combine_at(slices, &p[..n], cell, &table, q, &mut vals, &mut dxs, &mut u, &mut ux);
                u0(mesh.x_of(cell, xi), y, &mut g);
                let d2: f64 = u.iter().zip(&g).map(|(a, b)| (a - b) * (a - b)).sum();
                s += h * wq * d2;
            }
        }
        total += w * s;
    }
    total
}

/// `Σ_i ‖R_i − u_i‖²` for matching reconstruction and numerical modes
/// (Parseval over the orthonormal basis).
pub fn gap_sq(recon: &[&ContinuousPiecewisePoly], numerical: &[&DgFunction], points: usize) -> f64 {
    let first = recon[0];
    let (mesh, m) = (*first.mesh(), first.components());
    let rule = CellRule::gauss(points);
    let ct = C0Table::new(first.degree(), &rule.xi);
    let dt = DgTable::new(numerical[0].degree(), &rule.xi);
    let (mut a, mut ax, mut b) = (vec![0.0; m], vec![0.0; m], vec![0.0; m]);
    let h = mesh.h();
    let mut total = 0.0;
    for (r, u) in recon.iter().zip(numerical) {
        let mut s = 0.0;
        for cell in 0..mesh.cells {
            for (q, &wq) in rule.w.iter().enumerate() {
                r.eval_table(cell, &ct, q, &mut a, &mut ax);
                u.eval_table(cell, &dt, q, &mut b);
                let d2: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
                s += h * wq * d2;
            }
        }
        total += s;
    }
    total
}

/// `Σ_r w_r ‖u(·, y_r) − Σ_i u_i Ψ_i(y_r)‖²` against a reference solution.
pub fn true_error_sq<E>(
    modes: &[&DgFunction],
    basis: &GpcBasis,
    quad: &StochasticQuadrature,
    exact: impl Fn(f64, f64) -> Result<Vec<f64>, E>,
    points: usize,
) -> Result<f64, E> {
    let first = modes[0];
    let (mesh, m) = (*first.mesh(), first.components());
    let rule = CellRule::gauss(points);
    let table = DgTable::new(first.degree(), &rule.xi);
    let mut psi = vec![0.0; modes.len()];
    let (mut v, mut u) = (vec![0.0; m], vec![0.0; m]);
    let h = mesh.h();
    let mut total = 0.0;
    for (&y, &w) in quad.nodes.iter().zip(&quad.weights) {
        basis.eval_into(y, &mut psi);
        let mut s = 0.0;
        for cell in 0..mesh.cells {
            for (q, (&xi, &wq)) in rule.xi.iter().zip(&rule.w).enumerate() {
                u.fill(0.0);
                for (mode, &p) in modes.iter().zip(&psi) {
                    mode.eval_table(cell, &table, q, &mut v);
                    for c in 0..m {
                        u[c] += p * v[c];
                    }
                }
                let e = exact(mesh.x_of(cell, xi), y)?;
                let d2: f64 = u.iter().zip(&e).map(|(a, b)| (a - b) * (a - b)).sum();
                s += h * wq * d2;
            }
        }
        total += w * s;
    }
    Ok(total)
}

/// Sampled `max |∂_x û^sts|` on one interval (before the safety factor)
/// and the range of the sampled states.
#[derive(Debug, Clone, PartialEq)]
pub struct GradSupSample {
    pub sup: f64,
    pub range: StateRange,
}

/// Per-interval gradient sup-norm of `Σ_i psi[k][i] modes_i` over the
/// stochastic samples `psi[k]`, at the points of `space` plus both cell ends
/// and at θ ∈ {0, ½, 1}.
pub fn grad_sup_history(
    modes: &[&SpaceTimeReconstruction],
    psi: &[Vec<f64>],
    space: &CellRule,
    exec: Execution,
) -> Vec<GradSupSample> {
    let first = modes[0];
    let (mesh, m, n) = (*first.mesh(), first.components(), modes.len());
    let mut pts = vec![-1.0];
    pts.extend_from_slice(&space.xi);
    pts.push(1.0);
    let table = C0Table::new(first.degree(), &pts);
    exec.map(first.partition().intervals(), |k| {
        let mut sup = 0.0f64;
        let mut range = StateRange::empty(m);
        let (mut vals, mut dxs) = (vec![0.0; n * m], vec![0.0; n * m]);
        let (mut u, mut ux) = (vec![0.0; m], vec![0.0; m]);
        for theta in GRAD_THETAS {
            let slices: Vec<ContinuousPiecewisePoly> = modes.iter().map(|r| r.value_at(k, theta)).collect();
            let refs: Vec<&ContinuousPiecewisePoly> = slices.iter().collect();
            for cell in 0..mesh.cells {
                for q in 0..pts.len() {
                    super::eval_many(&refs, cell, &table, q, m, &mut vals, &mut dxs);
                    for p in psi {
                        u.fill(0.0);
                        ux.fill(0.0);
                        for i in 0..n {
                            for c in 0..m {
                                u[c] += p[i] * vals[i * m + c];
                                ux[c] += p[i] * dxs[i * m + c];
                            }
                        }
                        sup = sup.max(ux.iter().map(|v| v * v).sum::<f64>().sqrt());
                        range.include(&u);
                    }
                }
            }
        }
        GradSupSample { sup, range }
    })
}

/// `I_n = Σ_{k<n} Δt_k (C_η C_f g_k + C_η²)` for `n = 0..=N`, with `g_k`
/// the (safety-scaled) per-interval gradient sup.
pub fn gronwall_integrals(partition: &TimePartition, grad_sup: &[f64], c: &BoundConstants) -> Vec<f64> {
    let mut out = vec![0.0];
    let mut s = 0.0;
    for (k, &g) in grad_sup.iter().enumerate() {
        s += partition.dt(k) * (c.eta_upper * c.c_flux * g + c.eta_upper * c.eta_upper);
        out.push(s);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConstants {
    /// `C_f`.
    pub c_flux: f64,
    /// `c_η`.
    pub eta_lower: f64,
    /// `C_η`.
    pub eta_upper: f64,
}

impl From<&HessianBounds> for BoundConstants {
    fn from(h: &HessianBounds) -> Self {
        BoundConstants {
            c_flux: h.c_flux,
            eta_lower: h.eta_lower,
            eta_upper: h.eta_upper,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInputs {
    /// `‖û^sts(t_n) − u_h^n‖²`.
    pub gap: f64,
    /// Residual term `E^st(t_n)`.
    pub residual: f64,
    pub e0: f64,
    /// Gronwall integral up to `t_n`.
    pub integral: f64,
    pub constants: BoundConstants,
}

impl BoundInputs {
    pub fn exp_factor(&self) -> f64 {
        (self.integral / self.constants.eta_lower).exp()
    }
}

/// `2 gap + 2c_η⁻¹ (E + C_η E_0) exp(c_η⁻¹ I)`.
pub fn error_bound(inputs: &BoundInputs) -> f64 {
    let c = &inputs.constants;
    2.0 * inputs.gap
        + 2.0 / c.eta_lower * (inputs.residual + c.eta_upper * inputs.e0) * inputs.exp_factor()
}

/// [`error_bound`] with `E^st` replaced by `2E^det + 2E^sq + E^sc`.
pub fn error_bound_split(decomp: &ResidualDecomposition, inputs: &BoundInputs) -> f64 {
    error_bound(&BoundInputs {
        residual: decomp.split_residual(),
        ..*inputs
    })
}

/// All terms of both bounds at one reporting time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorBoundReport {
    pub t: f64,
    pub step: usize,
    pub gap: f64,
    pub e_det: f64,
    pub e_sq: f64,
    pub e_sc: f64,
    pub e_st: f64,
    pub e0: f64,
    pub constants: BoundConstants,
    /// Safety-scaled sampled sup of `|∂_x û^sts|` on each interval up to `t`.
    pub grad_sup: Vec<f64>,
    /// The gradient norms are sampled lower estimates times
    /// [`GRAD_SUP_SAFETY`], not exact suprema.
    pub grad_sup_sampled: bool,
    pub gronwall_integral: f64,
    pub exp_factor: f64,
    pub bound: f64,
    pub split_bound: f64,
    pub true_error: Option<f64>,
    pub effectivity: Option<f64>,
}

impl ErrorBoundReport {
    pub fn new(decomp: &ResidualDecomposition, inputs: &BoundInputs, grad_sup: &[f64]) -> Self {
        ErrorBoundReport {
            t: decomp.t,
            step: decomp.step,
            gap: inputs.gap,
            e_det: decomp.e_det,
            e_sq: decomp.e_sq,
            e_sc: decomp.e_sc,
            e_st: inputs.residual,
            e0: inputs.e0,
            constants: inputs.constants,
            grad_sup: grad_sup.to_vec(),
            grad_sup_sampled: true,
            gronwall_integral: inputs.integral,
            exp_factor: inputs.exp_factor(),
            bound: error_bound(inputs),
            split_bound: error_bound_split(decomp, inputs),
            true_error: None,
            effectivity: None,
        }
    }

    pub fn with_true_error(mut self, err: f64) -> Self {
        self.true_error = Some(err);
        self.effectivity = Some(if err > 0.0 { self.bound / err } else { f64::INFINITY });
        self
    }
}
