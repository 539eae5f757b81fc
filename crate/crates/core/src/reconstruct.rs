//! Lipschitz space-time reconstruction of DG snapshots and its residual.
//!
//! In space each snapshot is lifted to the continuous degree-`p+1` space:
//! interface values are prescribed and the `p` bubble coefficients are fixed
//! by matching the cell moments of degree `≤ p−1`. With the hat functions and
//! `B_k = P_k − P_{k−2}` this local system is lower triangular, so
//!
//! ```text
//! ĥ_0 = (w_L + w_R)/2,  ĥ_1 = (w_R − w_L)/(2√3),  ĥ_i = 0 (i ≥ 2)
//! c_{i+2} = c_i [i ≥ 2] − √(2i+1) (u_i − ĥ_i),   i = 0..p−1
//! ```
//!
//! In time the slices are joined affinely, quadratically with the initial
//! slope `D_n = −P[∂_x F(R_n)]` (`P` the continuous L² projection), or by
//! cubic Hermite interpolation of the slopes `D_n`, `D_{n+1}`.

use serde::{Deserialize, Serialize};

use crate::error::ShapeError;
use crate::exec::Execution;
use crate::mesh_dg::{C0Table, CellRule, ContinuousPiecewisePoly, DgFunction, Mesh1D, PiecewisePoly};
use crate::models::ConservationLaw;
use crate::rkdg::TimePartition;
use crate::spacetime::{integrate, SpaceTimeKernel, SpaceTimeRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InterfaceRule {
    /// Arithmetic mean of the two traces.
    #[default]
    Mean,
    /// State recovered from the numerical flux,
    /// `w = ½(a+b) − (F(b) − F(a))/(2λ)`; the mean when `λ = 0`.
    FluxState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeRule {
    #[default]
    Linear,
    Hermite2,
    Hermite3,
}

/// Interface values `[j * m + c]` at the left end of each cell.
pub fn interface_values<M: ConservationLaw + ?Sized>(
    u: &DgFunction,
    rule: InterfaceRule,
    model: &M,
) -> Vec<f64> {
    let mesh = *u.mesh();
    let m = u.components();
    let n = mesh.cells;
    let mut left = vec![0.0; m];
    let mut right = vec![0.0; m];
    let mut out = vec![0.0; n * m];
    let (mut fa, mut fb) = (vec![0.0; m], vec![0.0; m]);
    for j in 0..n {
        u.eval_local(mesh.prev(j), 1.0, &mut left);
        u.eval_local(j, -1.0, &mut right);
        let w = &mut out[j * m..(j + 1) * m];
        for c in 0..m {
            w[c] = 0.5 * (left[c] + right[c]);
        }
        if rule == InterfaceRule::FluxState {
            let lambda = model.max_wave_speed(&left).max(model.max_wave_speed(&right));
            if lambda > 0.0 {
                model.flux(&left, &mut fa);
                model.flux(&right, &mut fb);
                for c in 0..m {
                    w[c] -= (fb[c] - fa[c]) / (2.0 * lambda);
                }
            }
        }
    }
    out
}

/// Spatial reconstruction with mean interface values.
pub fn space_reconstruct(u: &DgFunction) -> ContinuousPiecewisePoly {
    let iface = mean_interfaces(u);
    space_reconstruct_from_interfaces(u, &iface)
}

pub fn space_reconstruct_with<M: ConservationLaw + ?Sized>(
    u: &DgFunction,
    rule: InterfaceRule,
    model: &M,
) -> ContinuousPiecewisePoly {
    let iface = interface_values(u, rule, model);
    space_reconstruct_from_interfaces(u, &iface)
}

fn mean_interfaces(u: &DgFunction) -> Vec<f64> {
    let mesh = *u.mesh();
    let m = u.components();
    let mut left = vec![0.0; m];
    let mut right = vec![0.0; m];
    let mut out = vec![0.0; mesh.cells * m];
    for j in 0..mesh.cells {
        u.eval_local(mesh.prev(j), 1.0, &mut left);
        u.eval_local(j, -1.0, &mut right);
        for c in 0..m {
            out[j * m + c] = 0.5 * (left[c] + right[c]);
        }
    }
    out
}

/// Reconstruction from given interface values `[j * m + c]`.
pub fn space_reconstruct_from_interfaces(u: &DgFunction, iface: &[f64]) -> ContinuousPiecewisePoly {
    let mesh = *u.mesh();
    let (p, m) = (u.degree(), u.components());
    let mut r = ContinuousPiecewisePoly::zeros(mesh, p + 1, m);
    r.data_mut()[..mesh.cells * m].copy_from_slice(iface);
    let inv_2sqrt3 = 1.0 / (2.0 * 3f64.sqrt());
    let mut c = vec![0.0; p + 2];
    for j in 0..mesh.cells {
        let coeffs = u.cell(j).to_vec();
        let next = mesh.next(j);
        for comp in 0..m {
            let (wl, wr) = (iface[j * m + comp], iface[next * m + comp]);
            c.fill(0.0);
            for i in 0..p {
                let hat = match i {
                    0 => 0.5 * (wl + wr),
                    1 => (wr - wl) * inv_2sqrt3,
                    _ => 0.0,
                };
                let carry = if i >= 2 { c[i] } else { 0.0 };
                c[i + 2] = carry - ((2 * i + 1) as f64).sqrt() * (coeffs[i * m + comp] - hat);
            }
            let b = r.bubbles_mut(j);
            for k in 2..p + 2 {
                b[(k - 2) * m + comp] = c[k];
            }
        }
    }
    r
}

/// L² projection onto the continuous space by a Jacobi-preconditioned CG
/// solve with the assembled-on-the-fly mass matrix.
#[derive(Debug, Clone)]
pub struct ContinuousProjector {
    mesh: Mesh1D,
    degree: usize,
    rule: CellRule,
    table: C0Table,
    /// Reference mass matrix `Σ_q w_q φ_a φ_b` (multiply by `h`).
    local_mass: Vec<f64>,
    diag: Vec<f64>,
}

const CG_TOL: f64 = 1e-14;

impl ContinuousProjector {
    pub fn new(mesh: Mesh1D, degree: usize) -> Self {
        let rule = CellRule::gauss(degree + 3);
        let table = C0Table::new(degree, &rule.xi);
        let nl = degree + 1;
        let mut local_mass = vec![0.0; nl * nl];
        for (q, &w) in rule.w.iter().enumerate() {
            let phi = &table.vals[q * nl..(q + 1) * nl];
            for a in 0..nl {
                for b in 0..nl {
                    local_mass[a * nl + b] += w * phi[a] * phi[b];
                }
            }
        }
        let mut proj = ContinuousProjector {
            mesh,
            degree,
            rule,
            table,
            local_mass,
            diag: Vec::new(),
        };
        let mut diag = vec![0.0; proj.dofs()];
        let h = mesh.h();
        for cell in 0..mesh.cells {
            for a in 0..nl {
                diag[proj.dof(cell, a)] += h * proj.local_mass[a * nl + a];
            }
        }
        proj.diag = diag;
        proj
    }

    pub fn rule(&self) -> &CellRule {
        &self.rule
    }

    /// Continuous basis at [`Self::rule`].
    pub fn table(&self) -> &C0Table {
        &self.table
    }

    fn dofs(&self) -> usize {
        self.mesh.cells * self.degree
    }

    fn dof(&self, cell: usize, a: usize) -> usize {
        match a {
            0 => cell,
            1 => self.mesh.next(cell),
            _ => self.mesh.cells + cell * (self.degree - 1) + a - 2,
        }
    }

    fn apply(&self, m: usize, x: &[f64], y: &mut [f64]) {
        y.fill(0.0);
        let nl = self.degree + 1;
        let h = self.mesh.h();
        for cell in 0..self.mesh.cells {
            for a in 0..nl {
                let ia = self.dof(cell, a) * m;
                for b in 0..nl {
                    let ib = self.dof(cell, b) * m;
                    let mab = h * self.local_mass[a * nl + b];
                    for c in 0..m {
                        y[ia + c] += mab * x[ib + c];
                    }
                }
            }
        }
    }

    /// Projects the function given by its values at the rule points:
    /// `f(cell, q, out)`.
    pub fn project(
        &self,
        m: usize,
        mut f: impl FnMut(usize, usize, &mut [f64]),
    ) -> ContinuousPiecewisePoly {
        let nl = self.degree + 1;
        let h = self.mesh.h();
        let size = self.dofs() * m;
        let mut rhs = vec![0.0; size];
        let mut v = vec![0.0; m];
        for cell in 0..self.mesh.cells {
            for (q, &w) in self.rule.w.iter().enumerate() {
                f(cell, q, &mut v);
                for a in 0..nl {
                    let s = h * w * self.table.vals[q * nl + a];
                    let i = self.dof(cell, a) * m;
                    for c in 0..m {
                        rhs[i + c] += s * v[c];
                    }
                }
            }
        }
        let mut out = ContinuousPiecewisePoly::zeros(self.mesh, self.degree, m);
        self.solve(m, &rhs, out.data_mut());
        out
    }

    fn solve(&self, m: usize, b: &[f64], x: &mut [f64]) {
        let n = b.len();
        let precond = |r: &[f64], z: &mut [f64]| {
            for i in 0..n {
                z[i] = r[i] / self.diag[i / m];
            }
        };
        x.fill(0.0);
        let mut r = b.to_vec();
        let mut z = vec![0.0; n];
        precond(&r, &mut z);
        let mut p = z.clone();
        let mut ap = vec![0.0; n];
        let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let bnorm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        if bnorm == 0.0 {
            return;
        }
        for _ in 0..4 * n + 10 {
            self.apply(m, &p, &mut ap);
            let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
            if pap <= 0.0 {
                break;
            }
            let alpha = rz / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            if r.iter().map(|v| v * v).sum::<f64>().sqrt() <= CG_TOL * bnorm {
                break;
            }
            precond(&r, &mut z);
            let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            for i in 0..n {
                p[i] = z[i] + beta * p[i];
            }
        }
    }
}

/// `P[∂_x F(r)]`, with `∂_x F(r) = DF(r) ∂_x r` cellwise.
pub fn projected_flux_derivative<M: ConservationLaw + ?Sized>(
    model: &M,
    r: &ContinuousPiecewisePoly,
    proj: &ContinuousProjector,
) -> ContinuousPiecewisePoly {
    let m = r.components();
    let (mut v, mut dx) = (vec![0.0; m], vec![0.0; m]);
    let mut jac = vec![0.0; m * m];
    proj.project(m, |cell, q, out| {
        r.eval_table(cell, proj.table(), q, &mut v, &mut dx);
        model.flux_jacobian(&v, &mut jac);
        for i in 0..m {
            out[i] = (0..m).map(|k| jac[i * m + k] * dx[k]).sum();
        }
    })
}

/// Quadratic correction `c = Δt D_n − (R_{n+1} − R_n)` with
/// `D_n = −P[∂_x F(R_n)]`, so that `û(θ) = (1−θ)R_n + θR_{n+1} + θ(1−θ)c`
/// starts with slope `D_n`.
pub fn hermite_correction<M: ConservationLaw + ?Sized>(
    model: &M,
    r_n: &ContinuousPiecewisePoly,
    r_next: &ContinuousPiecewisePoly,
    dt: f64,
    proj: &ContinuousProjector,
) -> ContinuousPiecewisePoly {
    let d = projected_flux_derivative(model, r_n, proj);
    ContinuousPiecewisePoly::combination(&[(&d, -dt), (r_next, -1.0), (r_n, 1.0)])
}

/// Per-interval corrections of `rule` for the given slices: none for
/// [`TimeRule::Linear`], `c_n` for [`TimeRule::Hermite2`], and
/// `a_n = Δt D_n − Δ_n`, `b_n = Δt D_{n+1} − Δ_n` interleaved for
/// [`TimeRule::Hermite3`], where
/// `û(θ) = (1−θ)R_n + θR_{n+1} + θ(1−θ)² a_n − θ²(1−θ) b_n`.
pub fn time_corrections<M: ConservationLaw + ?Sized>(
    model: &M,
    slices: &[ContinuousPiecewisePoly],
    partition: &TimePartition,
    rule: TimeRule,
    proj: &ContinuousProjector,
) -> Vec<ContinuousPiecewisePoly> {
    let intervals = partition.intervals().min(slices.len().saturating_sub(1));
    match rule {
        TimeRule::Linear => Vec::new(),
        TimeRule::Hermite2 => (0..intervals)
            .map(|n| hermite_correction(model, &slices[n], &slices[n + 1], partition.dt(n), proj))
            .collect(),
        TimeRule::Hermite3 => {
            let d: Vec<_> = slices.iter().map(|r| projected_flux_derivative(model, r, proj)).collect();
            (0..intervals)
                .flat_map(|n| {
                    let dt = partition.dt(n);
                    let (r0, r1) = (&slices[n], &slices[n + 1]);
                    [
                        ContinuousPiecewisePoly::combination(&[(&d[n], -dt), (r1, -1.0), (r0, 1.0)]),
                        ContinuousPiecewisePoly::combination(&[(&d[n + 1], -dt), (r1, -1.0), (r0, 1.0)]),
                    ]
                })
                .collect()
        }
    }
}

/// Piecewise-in-time reconstruction over a [`TimePartition`].
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeReconstruction {
    partition: TimePartition,
    time_rule: TimeRule,
    slices: Vec<ContinuousPiecewisePoly>,
    /// See [`time_corrections`].
    corrections: Vec<ContinuousPiecewisePoly>,
}

impl SpaceTimeReconstruction {
    pub fn new(
        partition: TimePartition,
        time_rule: TimeRule,
        slices: Vec<ContinuousPiecewisePoly>,
        corrections: Vec<ContinuousPiecewisePoly>,
    ) -> Result<Self, ShapeError> {
        if slices.len() != partition.nodes().len() {
            return Err(ShapeError::Mismatch {
                what: "time slices",
                expected: partition.nodes().len(),
                got: slices.len(),
            });
        }
        let want = match time_rule {
            TimeRule::Linear => 0,
            TimeRule::Hermite2 => partition.intervals(),
            TimeRule::Hermite3 => 2 * partition.intervals(),
        };
        if corrections.len() != want {
            return Err(ShapeError::Mismatch {
                what: "time corrections",
                expected: want,
                got: corrections.len(),
            });
        }
        let first = &slices[0];
        if slices.iter().chain(&corrections).any(|s| !s.same_space(first)) {
            return Err(ShapeError::Incompatible("reconstruction slices in different spaces".into()));
        }
        Ok(SpaceTimeReconstruction {
            partition,
            time_rule,
            slices,
            corrections,
        })
    }

    /// Reconstructs a trajectory of snapshots at the partition nodes.
    pub fn build<M: ConservationLaw + ?Sized>(
        model: &M,
        snapshots: &[DgFunction],
        partition: &TimePartition,
        interface: InterfaceRule,
        time_rule: TimeRule,
    ) -> Result<Self, ShapeError> {
        let first = snapshots.first().ok_or(ShapeError::Mismatch {
            what: "snapshots",
            expected: partition.nodes().len(),
            got: 0,
        })?;
        if snapshots.iter().any(|s| !s.same_space(first)) {
            return Err(ShapeError::Incompatible("snapshots in different spaces".into()));
        }
        let slices: Vec<_> = snapshots
            .iter()
            .map(|u| match interface {
                InterfaceRule::Mean => space_reconstruct(u),
                InterfaceRule::FluxState => space_reconstruct_with(u, interface, model),
            })
            .collect();
        let corrections = match time_rule {
            TimeRule::Linear => Vec::new(),
            _ => {
                let proj = ContinuousProjector::new(*first.mesh(), first.degree() + 1);
                time_corrections(model, &slices, partition, time_rule, &proj)
            }
        };
        Self::new(partition.clone(), time_rule, slices, corrections)
    }

    pub fn partition(&self) -> &TimePartition {
        &self.partition
    }

    pub fn time_rule(&self) -> TimeRule {
        self.time_rule
    }

    pub fn mesh(&self) -> &Mesh1D {
        self.slices[0].mesh()
    }

    /// Spatial degree `p + 1`.
    pub fn degree(&self) -> usize {
        self.slices[0].degree()
    }

    pub fn components(&self) -> usize {
        self.slices[0].components()
    }

    pub fn slices(&self) -> &[ContinuousPiecewisePoly] {
        &self.slices
    }

    pub fn corrections(&self) -> &[ContinuousPiecewisePoly] {
        &self.corrections
    }

    pub fn same_space(&self, other: &Self) -> bool {
        self.partition == other.partition
            && self.time_rule == other.time_rule
            && self.slices[0].same_space(&other.slices[0])
    }

    /// `Σ_s coef_s · r_s` slice by slice. All parts must share the space.
    pub fn combination(parts: &[(&Self, f64)]) -> Self {
        let first = parts[0].0;
        debug_assert!(parts.iter().all(|(r, _)| r.same_space(first)));
        let slices = (0..first.slices.len())
            .map(|n| {
                let sp: Vec<_> = parts.iter().map(|(r, w)| (&r.slices[n], *w)).collect();
                ContinuousPiecewisePoly::combination(&sp)
            })
            .collect();
        let corrections = (0..first.corrections.len())
            .map(|n| {
                let sp: Vec<_> = parts.iter().map(|(r, w)| (&r.corrections[n], *w)).collect();
                ContinuousPiecewisePoly::combination(&sp)
            })
            .collect();
        SpaceTimeReconstruction {
            partition: first.partition.clone(),
            time_rule: first.time_rule,
            slices,
            corrections,
        }
    }

    /// Coefficients of `û(θ)` and `∂_t û(θ)` on interval `n` over the
    /// slices and then the corrections of that interval.
    fn weights(&self, n: usize, theta: f64) -> ([f64; 4], [f64; 4]) {
        let inv = 1.0 / self.partition.dt(n);
        let s = 1.0 - theta;
        match self.time_rule {
            TimeRule::Linear => ([s, theta, 0.0, 0.0], [-inv, inv, 0.0, 0.0]),
            TimeRule::Hermite2 => ([s, theta, theta * s, 0.0], [-inv, inv, (1.0 - 2.0 * theta) * inv, 0.0]),
            TimeRule::Hermite3 => (
                [s, theta, theta * s * s, -theta * theta * s],
                [-inv, inv, s * (1.0 - 3.0 * theta) * inv, -theta * (2.0 - 3.0 * theta) * inv],
            ),
        }
    }

    fn parts(&self, n: usize, w: [f64; 4]) -> Vec<(&ContinuousPiecewisePoly, f64)> {
        let mut parts = vec![(&self.slices[n], w[0]), (&self.slices[n + 1], w[1])];
        match self.time_rule {
            TimeRule::Linear => {}
            TimeRule::Hermite2 => parts.push((&self.corrections[n], w[2])),
            TimeRule::Hermite3 => {
                parts.push((&self.corrections[2 * n], w[2]));
                parts.push((&self.corrections[2 * n + 1], w[3]));
            }
        }
        parts
    }

    /// `(û, ∂_t û)` on interval `n` at local time θ as spatial functions.
    /// At θ = 0 and θ = 1 the value is the slice itself.
    pub fn at(&self, n: usize, theta: f64) -> (ContinuousPiecewisePoly, ContinuousPiecewisePoly) {
        let wr = self.weights(n, theta).1;
        (self.value_at(n, theta), ContinuousPiecewisePoly::combination(&self.parts(n, wr)))
    }

    /// `û(θ)` alone; see [`Self::at`].
    pub fn value_at(&self, n: usize, theta: f64) -> ContinuousPiecewisePoly {
        if theta == 0.0 {
            self.slices[n].clone()
        } else if theta == 1.0 {
            self.slices[n + 1].clone()
        } else {
            ContinuousPiecewisePoly::combination(&self.parts(n, self.weights(n, theta).0))
        }
    }

    /// Value, x-derivative and t-derivative at `(t, x)`. Interface points
    /// use the cell to their right; interior time nodes the later interval.
    pub fn eval(&self, t: f64, x: f64) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let m = self.components();
        let (n, theta) = self.partition.locate(t);
        let (n, theta) = if theta == 1.0 && n + 1 < self.partition.intervals() {
            (n + 1, 0.0)
        } else {
            (n, theta)
        };
        let (cell, xi) = self.mesh().locate(x);
        let table = C0Table::new(self.degree(), &[xi]);
        let (wv, wr) = self.weights(n, theta);
        let (mut u, mut ux, mut ut, mut dummy) = (vec![0.0; m], vec![0.0; m], vec![0.0; m], vec![0.0; m]);
        ContinuousPiecewisePoly::eval_table_combined(&self.parts(n, wv), cell, &table, 0, &mut u, &mut ux);
        ContinuousPiecewisePoly::eval_table_combined(&self.parts(n, wr), cell, &table, 0, &mut ut, &mut dummy);
        (u, ux, ut)
    }
}

/// `r = u_t + DF(u) u_x` at a point; `jac` is scratch of size `m²`.
pub fn residual_at<M: ConservationLaw + ?Sized>(
    model: &M,
    u: &[f64],
    ux: &[f64],
    ut: &[f64],
    jac: &mut [f64],
    out: &mut [f64],
) {
    let m = u.len();
    model.flux_jacobian(u, jac);
    for i in 0..m {
        let mut s = ut[i];
        for k in 0..m {
            s += jac[i * m + k] * ux[k];
        }
        out[i] = s;
    }
}

/// Space-time residual `∂_t û + ∂_x F(û)` at `(t, x)`.
pub fn st_residual_eval<M: ConservationLaw + ?Sized>(
    recon: &SpaceTimeReconstruction,
    model: &M,
    t: f64,
    x: f64,
) -> Vec<f64> {
    let (u, ux, ut) = recon.eval(t, x);
    let m = u.len();
    let mut jac = vec![0.0; m * m];
    let mut out = vec![0.0; m];
    residual_at(model, &u, &ux, &ut, &mut jac, &mut out);
    out
}

struct ResidualKernel<'a, M: ?Sized> {
    model: &'a M,
    recon: &'a SpaceTimeReconstruction,
    table: &'a C0Table,
}

impl<M: ConservationLaw + ?Sized> SpaceTimeKernel for ResidualKernel<'_, M> {
    type Slice = (ContinuousPiecewisePoly, ContinuousPiecewisePoly);
    type Acc = f64;

    fn new_acc(&self) -> f64 {
        0.0
    }

    fn prepare(&self, interval: usize, theta: f64) -> Self::Slice {
        self.recon.at(interval, theta)
    }

    fn accumulate(&self, slice: &Self::Slice, cell: usize, q: usize, weight: f64, acc: &mut f64) {
        let m = self.recon.components();
        let mut buf = [0.0; 40];
        let (u, rest) = buf.split_at_mut(m);
        let (ux, rest) = rest.split_at_mut(m);
        let (ut, rest) = rest.split_at_mut(m);
        let (scratch, rest) = rest.split_at_mut(m);
        let (r, rest) = rest.split_at_mut(m);
        let jac = &mut rest[..m * m];
        slice.0.eval_table(cell, self.table, q, u, ux);
        slice.1.eval_table(cell, self.table, q, ut, scratch);
        residual_at(self.model, u, ux, ut, jac, r);
        *acc += weight * r.iter().map(|v| v * v).sum::<f64>();
    }
}

/// `∫_{t_n}^{t_{n+1}} ∫ |R^st|² dx dt` for every interval.
pub fn residual_norms_sq<M: ConservationLaw + ?Sized>(
    recon: &SpaceTimeReconstruction,
    model: &M,
    rule: &SpaceTimeRule,
    exec: Execution,
) -> Vec<f64> {
    let kernel = ResidualKernel {
        model,
        recon,
        table: &rule.table,
    };
    integrate(&kernel, recon.mesh(), recon.partition(), rule, exec)
}
