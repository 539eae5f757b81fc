//! Orthogonal splitting of the space-time-stochastic residual.
//!
//! At every space-time quadrature point the kernel forms
//!
//! - `R^det_j = Σ_l R^st(y_l) Ψ_j(y_l) w_l` from the per-node residuals,
//! - `Q_j = Σ_l ∂_x F(û^st(y_l)) Ψ_j(y_l) w_l`,
//! - `P_j = ⟨∂_x F(û^sts), Ψ_j⟩` by the reference rule,
//!
//! and accumulates `|R^det_j|²`, `|P_j − Q_j|²` (j ≤ M), `|P_j|²` (M < j ≤
//! M_ref) and, independently, the reference-rule sample of `|R^sts|²`.

use serde::{Deserialize, Serialize};

use super::StsReconstruction;
use crate::error::{EstimatorError, ShapeError};
use crate::exec::Execution;
use crate::gpc::{build_basis, build_quadrature, projection_weights, Family, GpcBasis, StochasticQuadrature};
use crate::mesh_dg::{C0Table, ContinuousPiecewisePoly};
use crate::models::ConservationLaw;
use crate::reconstruct::{residual_at, residual_norms_sq, SpaceTimeReconstruction};
use crate::spacetime::{integrate, SpaceTimeKernel, SpaceTimeRule};

/// Stochastic rule standing in for exact inner products over Ξ, with the
/// basis values `psi[r][j]`, `j ≤ max_mode`, at its nodes.
#[derive(Debug, Clone)]
pub struct ReferenceRule {
    pub quad: StochasticQuadrature,
    pub max_mode: usize,
    pub psi: Vec<Vec<f64>>,
}

impl ReferenceRule {
    pub fn new(family: Family, order: usize, max_mode: usize) -> Self {
        let quad = build_quadrature(family, order);
        let basis = build_basis(family, max_mode);
        let psi = quad.nodes.iter().map(|&y| basis.values(y)).collect();
        ReferenceRule { quad, max_mode, psi }
    }
}

/// Squared residual contributions of one time interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalResiduals {
    pub det: Vec<f64>,
    pub sq: Vec<f64>,
    /// Modes `M+1..=M_ref`.
    pub sc: Vec<f64>,
    /// Reference-rule sample of `‖R^sts‖²`.
    pub st_ref: f64,
    /// `Σ_{j≤M} |R^det_j + R^sq_j|² + Σ_{j>M} |R^sc_j|²`.
    pub pythagoras: f64,
    /// `Σ_{j>M} |R^sc_j|²` with the finer aliasing-check rule.
    pub sc_alias: Option<f64>,
    pub flagged: usize,
    pub samples: usize,
}

impl IntervalResiduals {
    fn zeros(max_mode: usize, ref_max_mode: usize, alias: bool) -> Self {
        IntervalResiduals {
            det: vec![0.0; max_mode + 1],
            sq: vec![0.0; max_mode + 1],
            sc: vec![0.0; ref_max_mode - max_mode],
            st_ref: 0.0,
            pythagoras: 0.0,
            sc_alias: alias.then_some(0.0),
            flagged: 0,
            samples: 0,
        }
    }
}

/// Per-interval residual contributions over a whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualHistory {
    pub times: Vec<f64>,
    pub intervals: Vec<IntervalResiduals>,
    /// Per-interval `‖R^sts‖²` entering the unsplit bound. With `M = 0` the
    /// reconstruction is constant in `y` and this is the residual norm of
    /// mode 0; otherwise it is the reference-rule sample.
    pub st: Vec<f64>,
    pub max_mode: usize,
    pub ref_max_mode: usize,
}

/// Cumulative residual quantities on `(0, t_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualDecomposition {
    pub t: f64,
    pub step: usize,
    pub det_norms: Vec<f64>,
    pub sq_norms: Vec<f64>,
    pub sc_norms: Vec<f64>,
    pub e_det: f64,
    pub e_sq: f64,
    pub e_sc: f64,
    pub e_st: f64,
    pub e_st_ref: f64,
    pub pythagoras_sum: f64,
    /// Relative change of `E^sc` under the finer aliasing-check rule.
    pub alias_discrepancy: Option<f64>,
    pub flagged: usize,
    pub samples: usize,
}

impl ResidualDecomposition {
    /// `2E^det + 2E^sq + E^sc`.
    pub fn split_residual(&self) -> f64 {
        2.0 * self.e_det + 2.0 * self.e_sq + self.e_sc
    }

    /// `|‖R^sts‖²_ref − Σ‖R^det_j + R^sq_j‖² − Σ‖R^sc_j‖²| / ‖R^sts‖²_ref`.
    pub fn pythagoras_defect(&self) -> f64 {
        if self.e_st_ref == 0.0 {
            self.pythagoras_sum.abs()
        } else {
            (self.e_st_ref - self.pythagoras_sum).abs() / self.e_st_ref
        }
    }

    /// Last retained cut-off mode norm, for judging truncation decay.
    pub fn last_cutoff_norm(&self) -> Option<f64> {
        self.sc_norms.last().copied()
    }
}

impl ResidualHistory {
    pub fn steps(&self) -> usize {
        self.intervals.len()
    }

    /// Aggregates over the first `n` intervals, i.e. at `t_n`.
    pub fn at(&self, n: usize) -> ResidualDecomposition {
        let n = n.min(self.intervals.len());
        let cum = |f: &dyn Fn(&IntervalResiduals) -> f64| {
            let mut s = 0.0;
            for iv in &self.intervals[..n] {
                s += f(iv);
            }
            s
        };
        let det: Vec<f64> = (0..=self.max_mode).map(|j| cum(&|iv| iv.det[j])).collect();
        let sq: Vec<f64> = (0..=self.max_mode).map(|j| cum(&|iv| iv.sq[j])).collect();
        let sc: Vec<f64> = (0..self.ref_max_mode - self.max_mode).map(|j| cum(&|iv| iv.sc[j])).collect();
        let sum = |v: &[f64]| {
            let mut s = 0.0;
            for &x in v {
                s += x;
            }
            s
        };
        let e_sc = sum(&sc);
        let mut e_st = 0.0;
        for &a in &self.st[..n] {
            e_st += a;
        }
        let alias_discrepancy = if self.intervals.first().is_some_and(|iv| iv.sc_alias.is_some()) {
            let fine = cum(&|iv| iv.sc_alias.unwrap_or(0.0));
            let scale = fine.abs().max(e_sc.abs());
            Some(if scale > 0.0 { (fine - e_sc).abs() / scale } else { 0.0 })
        } else {
            None
        };
        let (mut flagged, mut samples) = (0, 0);
        for iv in &self.intervals[..n] {
            flagged += iv.flagged;
            samples += iv.samples;
        }
        ResidualDecomposition {
            t: self.times[n],
            step: n,
            e_det: sum(&det),
            e_sq: sum(&sq),
            e_sc,
            e_st,
            e_st_ref: cum(&|iv| iv.st_ref),
            pythagoras_sum: cum(&|iv| iv.pythagoras),
            det_norms: det.iter().map(|v| v.sqrt()).collect(),
            sq_norms: sq.iter().map(|v| v.sqrt()).collect(),
            sc_norms: sc.iter().map(|v| v.sqrt()).collect(),
            alias_discrepancy,
            flagged,
            samples,
        }
    }
}

struct Slice {
    node_vals: Vec<ContinuousPiecewisePoly>,
    node_rates: Vec<ContinuousPiecewisePoly>,
    mode_vals: Vec<ContinuousPiecewisePoly>,
    mode_rates: Vec<ContinuousPiecewisePoly>,
}

struct Scratch {
    u: Vec<f64>,
    ux: Vec<f64>,
    ut: Vec<f64>,
    dummy: Vec<f64>,
    jac: Vec<f64>,
    r_nodes: Vec<f64>,
    g_nodes: Vec<f64>,
    mu: Vec<f64>,
    mux: Vec<f64>,
    mut_: Vec<f64>,
    rdet: Vec<f64>,
    q: Vec<f64>,
    p: Vec<f64>,
    d: Vec<f64>,
}

struct Acc {
    res: IntervalResiduals,
    s: Scratch,
}

struct DecompositionKernel<'a, M: ?Sized> {
    model: &'a M,
    nodes: &'a [SpaceTimeReconstruction],
    modes: &'a [SpaceTimeReconstruction],
    /// `c[j][l] = Ψ_j(y_l) w_l`.
    weights: Vec<Vec<f64>>,
    reference: &'a ReferenceRule,
    alias: Option<&'a ReferenceRule>,
    table: &'a C0Table,
    m: usize,
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|v| v * v).sum::<f64>()
}

impl<M: ConservationLaw + ?Sized> DecompositionKernel<'_, M> {
    fn max_mode(&self) -> usize {
        self.modes.len() - 1
    }

    /// Fills `s.p[j*m..]` with `⟨∂_x F(û^sts), Ψ_j⟩` by `rule` and returns
    /// `(Σ_r w_r |R^sts(y_r)|², flagged)`.
    fn sample_reference(&self, rule: &ReferenceRule, s: &mut Scratch) -> (f64, usize) {
        let (m, nm) = (self.m, self.modes.len());
        let p = &mut s.p[..(rule.max_mode + 1) * m];
        p.fill(0.0);
        let mut st = 0.0;
        let mut flagged = 0;
        for (psi, &w) in rule.psi.iter().zip(&rule.quad.weights) {
            s.u.fill(0.0);
            s.ux.fill(0.0);
            s.ut.fill(0.0);
            for i in 0..nm {
                for c in 0..m {
                    s.u[c] += psi[i] * s.mu[i * m + c];
                    s.ux[c] += psi[i] * s.mux[i * m + c];
                    s.ut[c] += psi[i] * s.mut_[i * m + c];
                }
            }
            if self.model.check_admissible(&s.u).is_err() {
                flagged += 1;
                continue;
            }
            self.model.flux_jacobian(&s.u, &mut s.jac);
            let mut r2 = 0.0;
            for i in 0..m {
                let mut g = 0.0;
                for k in 0..m {
                    g += s.jac[i * m + k] * s.ux[k];
                }
                s.d[i] = g;
                r2 += (s.ut[i] + g) * (s.ut[i] + g);
            }
            st += w * r2;
            for j in 0..=rule.max_mode {
                let a = w * psi[j];
                for c in 0..m {
                    p[j * m + c] += a * s.d[c];
                }
            }
        }
        (st, flagged)
    }
}

impl<M: ConservationLaw + ?Sized> SpaceTimeKernel for DecompositionKernel<'_, M> {
    type Slice = Slice;
    type Acc = Acc;

    fn new_acc(&self) -> Acc {
        let (m, l, nm) = (self.m, self.nodes.len(), self.modes.len());
        let pm = self.reference.max_mode + 1;
        Acc {
            res: IntervalResiduals::zeros(self.max_mode(), self.reference.max_mode, self.alias.is_some()),
            s: Scratch {
                u: vec![0.0; m],
                ux: vec![0.0; m],
                ut: vec![0.0; m],
                dummy: vec![0.0; m],
                jac: vec![0.0; m * m],
                r_nodes: vec![0.0; l * m],
                g_nodes: vec![0.0; l * m],
                mu: vec![0.0; nm * m],
                mux: vec![0.0; nm * m],
                mut_: vec![0.0; nm * m],
                rdet: vec![0.0; nm * m],
                q: vec![0.0; nm * m],
                p: vec![0.0; pm * m],
                d: vec![0.0; m],
            },
        }
    }

    fn prepare(&self, interval: usize, theta: f64) -> Slice {
        let (node_vals, node_rates) = self.nodes.iter().map(|r| r.at(interval, theta)).unzip();
        let (mode_vals, mode_rates) = self.modes.iter().map(|r| r.at(interval, theta)).unzip();
        Slice {
            node_vals,
            node_rates,
            mode_vals,
            mode_rates,
        }
    }

    fn accumulate(&self, sl: &Slice, cell: usize, q: usize, weight: f64, acc: &mut Acc) {
        let (m, nm) = (self.m, self.modes.len());
        let s = &mut acc.s;
        let t = self.table;
        for l in 0..self.nodes.len() {
            sl.node_vals[l].eval_table(cell, t, q, &mut s.u, &mut s.ux);
            sl.node_rates[l].eval_table(cell, t, q, &mut s.ut, &mut s.dummy);
            residual_at(self.model, &s.u, &s.ux, &s.ut, &mut s.jac, &mut s.r_nodes[l * m..(l + 1) * m]);
            for i in 0..m {
                let mut g = 0.0;
                for k in 0..m {
                    g += s.jac[i * m + k] * s.ux[k];
                }
                s.g_nodes[l * m + i] = g;
            }
        }
        for j in 0..nm {
            let (rd, qj) = (&mut s.rdet[j * m..(j + 1) * m], &mut s.q[j * m..(j + 1) * m]);
            rd.fill(0.0);
            qj.fill(0.0);
            for (l, &c) in self.weights[j].iter().enumerate() {
                for k in 0..m {
                    rd[k] += c * s.r_nodes[l * m + k];
                    qj[k] += c * s.g_nodes[l * m + k];
                }
            }
            sl.mode_vals[j].eval_table(cell, t, q, &mut s.mu[j * m..(j + 1) * m], &mut s.mux[j * m..(j + 1) * m]);
            sl.mode_rates[j].eval_table(cell, t, q, &mut s.mut_[j * m..(j + 1) * m], &mut s.dummy);
        }

        let res = &mut acc.res;
        if let Some(alias) = self.alias {
            self.sample_reference(alias, s);
            let mut sc = 0.0;
            for j in nm..=alias.max_mode {
                sc += sum_sq(&s.p[j * m..(j + 1) * m]);
            }
            if let Some(v) = res.sc_alias.as_mut() {
                *v += weight * sc;
            }
        }
        let (st, flagged) = self.sample_reference(self.reference, s);
        res.samples += self.reference.psi.len();
        res.flagged += flagged;
        res.st_ref += weight * st;

        let mut pyth = 0.0;
        for j in 0..nm {
            let rd = &s.rdet[j * m..(j + 1) * m];
            res.det[j] += weight * rd.iter().map(|v| v * v).sum::<f64>();
            for c in 0..m {
                s.d[c] = s.p[j * m + c] - s.q[j * m + c];
            }
            res.sq[j] += weight * sum_sq(&s.d);
            let mut tot = 0.0;
            for c in 0..m {
                tot += (rd[c] + s.d[c]) * (rd[c] + s.d[c]);
            }
            pyth += tot;
        }
        for j in nm..=self.reference.max_mode {
            let v = sum_sq(&s.p[j * m..(j + 1) * m]);
            res.sc[j - nm] += weight * v;
            pyth += v;
        }
        res.pythagoras += weight * pyth;
    }
}

/// Residual decomposition over every interval of the shared partition.
/// `quad`/`basis` are the NISP rule and basis that produced `sts` from the
/// per-node reconstructions `nodes`; `alias` is an optional finer rule used
/// only to check the reference rule.
#[allow(clippy::too_many_arguments)]
pub fn decompose_residual<M: ConservationLaw + ?Sized>(
    model: &M,
    nodes: &[SpaceTimeReconstruction],
    sts: &StsReconstruction,
    basis: &GpcBasis,
    quad: &StochasticQuadrature,
    reference: &ReferenceRule,
    alias: Option<&ReferenceRule>,
    rule: &SpaceTimeRule,
    exec: Execution,
) -> Result<ResidualHistory, EstimatorError> {
    let max_mode = sts.max_mode();
    if reference.max_mode <= max_mode {
        return Err(EstimatorError::Config(format!(
            "reference truncation {} must exceed M = {max_mode}",
            reference.max_mode
        )));
    }
    if alias.is_some_and(|a| a.max_mode != reference.max_mode) {
        return Err(EstimatorError::Config("aliasing rule must share the reference truncation".into()));
    }
    if nodes.len() != quad.len() {
        return Err(ShapeError::Mismatch {
            what: "node reconstructions",
            expected: quad.len(),
            got: nodes.len(),
        }
        .into());
    }
    let first = &sts.modes()[0];
    if nodes.iter().any(|r| !r.same_space(first)) {
        return Err(ShapeError::Incompatible("node reconstructions and modes differ".into()).into());
    }
    if rule.table.n_local != first.degree() + 1 {
        return Err(ShapeError::Incompatible("quadrature table built for another degree".into()).into());
    }
    let kernel = DecompositionKernel {
        model,
        nodes,
        modes: sts.modes(),
        weights: projection_weights(basis, quad, max_mode),
        reference,
        alias,
        table: &rule.table,
        m: first.components(),
    };
    let partition = first.partition();
    let intervals: Vec<IntervalResiduals> = integrate(&kernel, first.mesh(), partition, rule, exec)
        .into_iter()
        .map(|a| a.res)
        .collect();
    let st = if max_mode == 0 {
        residual_norms_sq(first, model, rule, exec)
    } else {
        intervals.iter().map(|iv| iv.st_ref).collect()
    };
    Ok(ResidualHistory {
        times: partition.nodes().to_vec(),
        intervals,
        st,
        max_mode,
        ref_max_mode: reference.max_mode,
    })
}
