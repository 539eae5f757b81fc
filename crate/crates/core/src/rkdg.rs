//! Runge-Kutta discontinuous Galerkin solver for the deterministic problem at
//! each stochastic quadrature node.
//!
//! All nodes share one time partition. [`solve_ensemble`] advances every node
//! in lockstep: per step the admissible step size is reduced (max wave speed)
//! over all nodes, then each node is advanced independently. Re-running a
//! single node with [`solve_divp`] on the recorded partition reproduces its
//! snapshots bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, ShapeError, SolverError};
use crate::exec::Execution;
use crate::mesh_dg::{l2_project, radau_project, CellRule, DgFunction, DgTable, Mesh1D};
use crate::models::ConservationLaw;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Limiter {
    None,
    /// TVB-modified minmod on each component; `m` is the TVB constant.
    TvbMinmod { m: f64 },
}

/// How the initial datum enters the DG space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialProjection {
    #[default]
    L2,
    /// Scalar laws only: moments of degree `≤ p−1` plus the downwind cell
    /// end value (the sign of `F'` at the cell centre picks the end). Avoids
    /// the initial layer the L² projection excites in the upwind-like
    /// scheme. Systems use the L² projection.
    Downwind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RkdgConfig {
    pub degree: usize,
    pub cfl: f64,
    pub rk_order: usize,
    pub limiter: Limiter,
    #[serde(default)]
    pub initial: InitialProjection,
}

impl RkdgConfig {
    /// Defaults: `cfl = 0.3/(2p+1)`, SSP order `min(p+1, 3)`, no limiter.
    pub fn new(degree: usize) -> Self {
        RkdgConfig {
            degree,
            cfl: default_cfl(degree),
            rk_order: default_rk_order(degree),
            limiter: Limiter::None,
            initial: InitialProjection::L2,
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if self.degree > 3 {
            return Err(SolverError::Config(format!(
                "polynomial degree {} not supported (0..=3)",
                self.degree
            )));
        }
        if !(self.cfl > 0.0) {
            return Err(SolverError::Config(format!("cfl must be positive, got {}", self.cfl)));
        }
        if !(1..=3).contains(&self.rk_order) {
            return Err(SolverError::Config(format!(
                "SSP order {} not tabulated (1, 2 or 3)",
                self.rk_order
            )));
        }
        Ok(())
    }
}

/// Initial DG datum according to `config.initial`.
pub fn project_initial<M: ConservationLaw + ?Sized>(
    model: &M,
    u0: impl Fn(f64, &mut [f64]),
    mesh: Mesh1D,
    config: &RkdgConfig,
) -> DgFunction {
    let m = model.system_size();
    match config.initial {
        InitialProjection::Downwind if m == 1 => {
            let (mut v, mut jac) = ([0.0], [0.0]);
            radau_project(&u0, mesh, config.degree, 1, |j, _| {
                u0(mesh.x_of(j, 0.0), &mut v);
                model.flux_jacobian(&v, &mut jac);
                jac[0] >= 0.0
            })
        }
        _ => l2_project(u0, mesh, config.degree, m),
    }
}

pub fn default_cfl(degree: usize) -> f64 {
    0.3 / (2 * degree + 1) as f64
}

pub fn default_rk_order(degree: usize) -> usize {
    (degree + 1).min(3)
}

/// Shared time nodes `0 = t_0 < t_1 < … < t_N = T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimePartition {
    nodes: Vec<f64>,
}

impl TimePartition {
    pub fn new(nodes: Vec<f64>) -> Result<Self, ShapeError> {
        if nodes.len() < 2 {
            return Err(ShapeError::Incompatible(
                "time partition needs at least two nodes".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(ShapeError::Incompatible(
                "time nodes must be strictly increasing".into(),
            ));
        }
        Ok(TimePartition { nodes })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn intervals(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn dt(&self, n: usize) -> f64 {
        self.nodes[n + 1] - self.nodes[n]
    }

    pub fn final_time(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Index of the time node closest to `t`.
    pub fn nearest(&self, t: f64) -> usize {
        let mut best = 0;
        for (i, &tn) in self.nodes.iter().enumerate() {
            if (tn - t).abs() < (self.nodes[best] - t).abs() {
                best = i;
            }
        }
        best
    }

    /// Interval `n` with `t_n ≤ t ≤ t_{n+1}` and the local coordinate θ.
    pub fn locate(&self, t: f64) -> (usize, f64) {
        let n = match self.nodes.binary_search_by(|v| v.total_cmp(&t)) {
            Ok(i) => i.min(self.intervals() - 1),
            Err(i) => i.saturating_sub(1).min(self.intervals() - 1),
        };
        let theta = ((t - self.nodes[n]) / self.dt(n)).clamp(0.0, 1.0);
        (n, theta)
    }
}

/// Local Lax-Friedrichs flux `½(F(a)+F(b)) − ½λ(b−a)`, `λ` the larger of the
/// two wave speeds.
pub fn numerical_flux<M: ConservationLaw + ?Sized>(
    model: &M,
    a: &[f64],
    b: &[f64],
    out: &mut [f64],
) -> Result<(), ModelError> {
    model.check_admissible(a)?;
    model.check_admissible(b)?;
    llf(model, a, b, out);
    Ok(())
}

fn llf<M: ConservationLaw + ?Sized>(model: &M, a: &[f64], b: &[f64], out: &mut [f64]) {
    let m = a.len();
    let mut fb = [0.0; 8];
    let fb = &mut fb[..m];
    model.flux(a, out);
    model.flux(b, fb);
    let lambda = model.max_wave_speed(a).max(model.max_wave_speed(b));
    for c in 0..m {
        out[c] = 0.5 * (out[c] + fb[c]) - 0.5 * lambda * (b[c] - a[c]);
    }
}

/// Precomputed tables for the weak DG operator on one mesh and degree.
#[derive(Debug, Clone)]
pub struct DgOperator {
    mesh: Mesh1D,
    degree: usize,
    m: usize,
    rule: CellRule,
    interior: DgTable,
    ends: DgTable,
}

impl DgOperator {
    pub fn new(mesh: Mesh1D, degree: usize, m: usize) -> Self {
        let rule = CellRule::gauss(degree + 2);
        let interior = DgTable::new(degree, &rule.xi);
        let ends = DgTable::new(degree, &[-1.0, 1.0]);
        DgOperator {
            mesh,
            degree,
            m,
            rule,
            interior,
            ends,
        }
    }

    /// Largest wave speed over the Gauss points and traces.
    pub fn max_speed<M: ConservationLaw + ?Sized>(&self, model: &M, u: &DgFunction) -> f64 {
        let mut v = vec![0.0; self.m];
        let mut s = 0.0f64;
        for j in 0..self.mesh.cells {
            for q in 0..self.rule.len() {
                u.eval_table(j, &self.interior, q, &mut v);
                s = s.max(model.max_wave_speed(&v));
            }
            for q in 0..2 {
                u.eval_table(j, &self.ends, q, &mut v);
                s = s.max(model.max_wave_speed(&v));
            }
        }
        s
    }

    /// Semi-discrete rate `du/dt` of the weak DG form.
    pub fn rhs<M: ConservationLaw + ?Sized>(
        &self,
        model: &M,
        u: &DgFunction,
        time: f64,
        rate: &mut DgFunction,
    ) -> Result<(), SolverError> {
        let (n, m, nb) = (self.mesh.cells, self.m, self.degree + 1);
        let h = self.mesh.h();
        let mut left_trace = vec![0.0; n * m];
        let mut right_trace = vec![0.0; n * m];
        for j in 0..n {
            u.eval_table(j, &self.ends, 0, &mut left_trace[j * m..(j + 1) * m]);
            u.eval_table(j, &self.ends, 1, &mut right_trace[j * m..(j + 1) * m]);
        }
        let fail = |cell, source| SolverError::Inadmissible { time, cell, source };
        // flux at the left interface of each cell
        let mut iface = vec![0.0; n * m];
        for j in 0..n {
            let a = &right_trace[self.mesh.prev(j) * m..(self.mesh.prev(j) + 1) * m];
            let b = &left_trace[j * m..(j + 1) * m];
            model.check_admissible(a).map_err(|e| fail(self.mesh.prev(j), e))?;
            model.check_admissible(b).map_err(|e| fail(j, e))?;
            llf(model, a, b, &mut iface[j * m..(j + 1) * m]);
        }
        let (mut v, mut f) = (vec![0.0; m], vec![0.0; m]);
        for j in 0..n {
            let out = rate.cell_mut(j);
            out.fill(0.0);
            for (q, &w) in self.rule.w.iter().enumerate() {
                u.eval_table(j, &self.interior, q, &mut v);
                model.check_admissible(&v).map_err(|e| fail(j, e))?;
                model.flux(&v, &mut f);
                for k in 1..nb {
                    let d = 2.0 * w * self.interior.ders[q * nb + k];
                    for c in 0..m {
                        out[k * m + c] += d * f[c];
                    }
                }
            }
            let fl = &iface[j * m..(j + 1) * m];
            let fr = &iface[self.mesh.next(j) * m..(self.mesh.next(j) + 1) * m];
            for k in 0..nb {
                let (phi_l, phi_r) = (self.ends.vals[k], self.ends.vals[nb + k]);
                for c in 0..m {
                    out[k * m + c] = (out[k * m + c] - fr[c] * phi_r + fl[c] * phi_l) / h;
                }
            }
        }
        Ok(())
    }

    fn limit(&self, limiter: Limiter, u: &mut DgFunction) {
        let Limiter::TvbMinmod { m: tvb } = limiter else {
            return;
        };
        if self.degree == 0 {
            return;
        }
        let (n, m, nb) = (self.mesh.cells, self.m, self.degree + 1);
        let h = self.mesh.h();
        let means: Vec<f64> = (0..n).flat_map(|j| u.cell_mean(j).to_vec()).collect();
        let threshold = tvb * h * h;
        let tvb_minmod = |a: f64, b: f64, c: f64| {
            if a.abs() <= threshold {
                a
            } else {
                minmod3(a, b, c)
            }
        };
        for j in 0..n {
            let (jp, jm) = (self.mesh.next(j), self.mesh.prev(j));
            let block = u.cell_mut(j);
            for c in 0..m {
                let mean = means[j * m + c];
                let fwd = means[jp * m + c] - mean;
                let bwd = mean - means[jm * m + c];
                let mut up = 0.0;
                let mut down = 0.0;
                for k in 1..nb {
                    let s = ((2 * k + 1) as f64).sqrt() * block[k * m + c];
                    up += s;
                    down -= if k % 2 == 0 { s } else { -s };
                }
                let (lu, ld) = (tvb_minmod(up, fwd, bwd), tvb_minmod(down, fwd, bwd));
                if lu != up || ld != down {
                    for k in 2..nb {
                        block[k * m + c] = 0.0;
                    }
                    block[m + c] = 0.5 * (lu + ld) / 3f64.sqrt();
                }
            }
        }
    }

    /// One SSP-RK step of size `dt` starting at `time`.
    pub fn step<M: ConservationLaw + ?Sized>(
        &self,
        model: &M,
        config: &RkdgConfig,
        u: &DgFunction,
        time: f64,
        dt: f64,
    ) -> Result<DgFunction, SolverError> {
        let mut k = DgFunction::zeros(self.mesh, self.degree, self.m);
        let euler = |from: &DgFunction, t: f64, k: &mut DgFunction| -> Result<DgFunction, SolverError> {
            self.rhs(model, from, t, k)?;
            let mut next = from.clone();
            next.axpy(dt, k);
            self.limit(config.limiter, &mut next);
            Ok(next)
        };
        match config.rk_order {
            1 => euler(u, time, &mut k),
            2 => {
                let u1 = euler(u, time, &mut k)?;
                let mut u2 = euler(&u1, time + dt, &mut k)?;
                u2.scale(0.5);
                u2.axpy(0.5, u);
                self.limit(config.limiter, &mut u2);
                Ok(u2)
            }
            3 => {
                let u1 = euler(u, time, &mut k)?;
                let mut u2 = euler(&u1, time + dt, &mut k)?;
                u2.scale(0.25);
                u2.axpy(0.75, u);
                self.limit(config.limiter, &mut u2);
                let mut u3 = euler(&u2, time + 0.5 * dt, &mut k)?;
                u3.scale(2.0 / 3.0);
                u3.axpy(1.0 / 3.0, u);
                self.limit(config.limiter, &mut u3);
                Ok(u3)
            }
            r => Err(SolverError::Config(format!("SSP order {r} not tabulated"))),
        }
    }
}

fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// Semi-discrete DG rate of `u` at time zero.
pub fn semidiscrete_rhs<M: ConservationLaw + ?Sized>(
    model: &M,
    u: &DgFunction,
) -> Result<DgFunction, SolverError> {
    use crate::mesh_dg::PiecewisePoly;
    let op = DgOperator::new(*u.mesh(), u.degree(), u.components());
    let mut rate = DgFunction::zeros(*u.mesh(), u.degree(), u.components());
    op.rhs(model, u, 0.0, &mut rate)?;
    Ok(rate)
}

const CLIP_TOL: f64 = 1e-12;
const MAX_STEPS: usize = 10_000_000;

/// Solves one node's problem on a prescribed partition, returning one
/// snapshot per time node.
pub fn solve_divp<M: ConservationLaw + ?Sized>(
    model: &M,
    u0: impl Fn(f64, &mut [f64]),
    mesh: Mesh1D,
    config: &RkdgConfig,
    partition: &TimePartition,
) -> Result<Vec<DgFunction>, SolverError> {
    config.validate()?;
    let m = model.system_size();
    let op = DgOperator::new(mesh, config.degree, m);
    let mut u = project_initial(model, u0, mesh, config);
    let mut out = Vec::with_capacity(partition.nodes().len());
    for n in 0..partition.intervals() {
        let (t, dt) = (partition.nodes()[n], partition.dt(n));
        let speed = op.max_speed(model, &u);
        let limit = if speed > 0.0 {
            config.cfl * mesh.h() / speed
        } else {
            f64::INFINITY
        };
        if dt > limit * (1.0 + 1e-12) {
            return Err(SolverError::CflViolation { time: t, dt, limit });
        }
        let next = op.step(model, config, &u, t, dt)?;
        out.push(std::mem::replace(&mut u, next));
    }
    out.push(u);
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct EnsembleSolution {
    pub partition: TimePartition,
    /// `snapshots[l][n]`: node `l` at time `t_n`.
    pub snapshots: Vec<Vec<DgFunction>>,
}

/// Advances all nodes with a shared adaptive partition:
/// `Δt = cfl·h / max_l λ_l(t_n)` (or `cfl·h` if every speed vanishes), the
/// last step clipped to hit `t_final`.
pub fn solve_ensemble<M: ConservationLaw + ?Sized>(
    model: &M,
    initial: Vec<DgFunction>,
    config: &RkdgConfig,
    t_final: f64,
    exec: Execution,
) -> Result<EnsembleSolution, SolverError> {
    config.validate()?;
    if !(t_final > 0.0) {
        return Err(SolverError::Config(format!("final time must be positive, got {t_final}")));
    }
    let first = initial
        .first()
        .ok_or_else(|| SolverError::Config("no quadrature nodes".into()))?;
    use crate::mesh_dg::PiecewisePoly;
    let mesh = *first.mesh();
    let m = model.system_size();
    for u in &initial {
        if u.mesh() != &mesh || u.degree() != config.degree || u.components() != m {
            return Err(ShapeError::Incompatible("initial data in different spaces".into()).into());
        }
    }
    let op = DgOperator::new(mesh, config.degree, m);
    let mut states = initial;
    let mut snapshots: Vec<Vec<DgFunction>> = states.iter().map(|u| vec![u.clone()]).collect();
    let mut times = vec![0.0];
    let mut t = 0.0;
    while t < t_final {
        if times.len() > MAX_STEPS {
            return Err(SolverError::Config("step limit exceeded".into()));
        }
        let speed = exec
            .map(states.len(), |l| op.max_speed(model, &states[l]))
            .into_iter()
            .fold(0.0f64, f64::max);
        let dt = if speed > 0.0 {
            config.cfl * mesh.h() / speed
        } else {
            config.cfl * mesh.h()
        };
        let t_next = if t + dt >= t_final - CLIP_TOL * t_final {
            t_final
        } else {
            t + dt
        };
        // step with the partition's own spacing so replays match exactly
        let dt = t_next - t;
        states = exec.try_map(states.len(), |l| op.step(model, config, &states[l], t, dt))?;
        t = t_next;
        times.push(t);
        for (snap, u) in snapshots.iter_mut().zip(&states) {
            snap.push(u.clone());
        }
    }
    Ok(EnsembleSolution {
        partition: TimePartition::new(times)?,
        snapshots,
    })
}

/// The shared partition alone (see [`solve_ensemble`]).
pub fn sync_time_partition<M: ConservationLaw + ?Sized>(
    model: &M,
    initial: Vec<DgFunction>,
    config: &RkdgConfig,
    t_final: f64,
    exec: Execution,
) -> Result<TimePartition, SolverError> {
    Ok(solve_ensemble(model, initial, config, t_final, exec)?.partition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh_dg::l2_error;
    use crate::models::Model;
    use std::f64::consts::TAU;

    #[test]
    fn flux_examples() {
        let mut out = [0.0];
        numerical_flux(&Model::Burgers, &[1.5], &[1.5], &mut out).unwrap();
        assert_eq!(out[0], 1.125);
        numerical_flux(&Model::Burgers, &[0.0], &[2.0], &mut out).unwrap();
        assert_eq!(out[0], -1.0);
        numerical_flux(&Model::Burgers, &[2.0], &[0.0], &mut out).unwrap();
        assert_eq!(out[0], 3.0);
        let sw = Model::ShallowWater { gravity: 1.0 };
        let mut o2 = [0.0; 2];
        numerical_flux(&sw, &[1.2, 0.3], &[1.2, 0.3], &mut o2).unwrap();
        let mut f = [0.0; 2];
        sw.flux(&[1.2, 0.3], &mut f);
        assert_eq!(o2, f);
        assert!(numerical_flux(&sw, &[-1.0, 0.0], &[1.0, 0.0], &mut o2).is_err());
    }

    #[test]
    fn constants_have_zero_rate() {
        let mesh = Mesh1D::new(0.0, TAU, 10).unwrap();
        let u = l2_project(|_, o| o[0] = 0.7, mesh, 2, 1);
        let r = semidiscrete_rhs(&Model::Burgers, &u).unwrap();
        assert!(r.coefficients().iter().all(|c| c.abs() < 1e-13));
    }

    #[test]
    fn rate_approximates_minus_derivative() {
        let model = Model::LinearAdvection { velocity: 1.0 };
        let err = |n| {
            let mesh = Mesh1D::new(0.0, TAU, n).unwrap();
            let u = l2_project(|x, o| o[0] = x.sin(), mesh, 2, 1);
            let r = semidiscrete_rhs(&model, &u).unwrap();
            l2_error(&r, |x, o| o[0] = -x.cos(), 6)
        };
        let (e32, e64) = (err(32), err(64));
        // the operator on a projection is only O(h^p); the solution gains one order
        assert!(e64 < 1e-3, "{e64}");
        assert!((e32 / e64).log2() > 1.8, "order {}", (e32 / e64).log2());
    }

    #[test]
    fn stencil_is_local() {
        let mesh = Mesh1D::new(0.0, 1.0, 12).unwrap();
        let mut u = l2_project(|_, o| o[0] = 1.0, mesh, 1, 1);
        u.cell_mut(5)[1] = 0.3;
        let r = semidiscrete_rhs(&Model::Burgers, &u).unwrap();
        for j in 0..12 {
            if !(4..=6).contains(&j) {
                assert!(r.cell(j).iter().all(|c| c.abs() < 1e-13), "cell {j}");
            }
        }
        assert!(r.cell(5).iter().any(|c| c.abs() > 1e-3));
    }

    #[test]
    fn partition_clips_final_step() {
        // speed 1 everywhere, cfl·h = 0.3
        let mesh = Mesh1D::new(0.0, 4.0, 4).unwrap();
        let mut cfg = RkdgConfig::new(0);
        cfg.cfl = 0.3;
        let u0 = l2_project(|_, o| o[0] = 1.0, mesh, 0, 1);
        let part = sync_time_partition(&Model::Burgers, vec![u0], &cfg, 1.0, Execution::Sequential)
            .unwrap();
        let expect = [0.0, 0.3, 0.6, 0.9, 1.0];
        assert_eq!(part.nodes().len(), expect.len());
        for (a, b) in part.nodes().iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(part.final_time(), 1.0);
    }

    #[test]
    fn fastest_node_governs_the_step() {
        let mesh = Mesh1D::new(0.0, 1.0, 10).unwrap();
        let cfg = RkdgConfig::new(1);
        let a = l2_project(|_, o| o[0] = 1.0, mesh, 1, 1);
        let b = l2_project(|_, o| o[0] = 2.0, mesh, 1, 1);
        let part = sync_time_partition(&Model::Burgers, vec![a.clone(), b], &cfg, 0.05, Execution::Sequential)
            .unwrap();
        assert!((part.dt(0) - cfg.cfl * mesh.h() / 2.0).abs() < 1e-15);
        let single = sync_time_partition(&Model::Burgers, vec![a], &cfg, 0.05, Execution::Sequential)
            .unwrap();
        assert!((single.dt(0) - cfg.cfl * mesh.h()).abs() < 1e-15);
    }

    #[test]
    fn zero_speed_falls_back_to_cfl_h() {
        let mesh = Mesh1D::new(0.0, 1.0, 10).unwrap();
        let cfg = RkdgConfig::new(1);
        let u = DgFunction::zeros(mesh, 1, 1);
        let part = sync_time_partition(&Model::Burgers, vec![u], &cfg, 0.1, Execution::Sequential)
            .unwrap();
        assert!((part.dt(0) - cfg.cfl * mesh.h()).abs() < 1e-16);
    }

    #[test]
    fn constant_data_stays_constant_and_mass_is_conserved() {
        let mesh = Mesh1D::new(0.0, TAU, 16).unwrap();
        let cfg = RkdgConfig::new(2);
        let u0 = l2_project(|_, o| o[0] = 0.4, mesh, 2, 1);
        let sol = solve_ensemble(&Model::Burgers, vec![u0], &cfg, 0.5, Execution::Sequential).unwrap();
        for s in &sol.snapshots[0] {
            for j in 0..16 {
                assert!((s.cell(j)[0] - 0.4).abs() < 1e-13);
            }
        }

        let u0 = l2_project(|x, o| o[0] = 0.5 + 0.25 * x.sin(), mesh, 2, 1);
        let mass0 = u0.total()[0];
        let sol = solve_ensemble(&Model::Burgers, vec![u0], &cfg, 0.5, Execution::Sequential).unwrap();
        for s in &sol.snapshots[0] {
            assert!((s.total()[0] - mass0).abs() < 1e-12);
        }
    }

    #[test]
    fn replay_on_shared_partition_is_bit_identical() {
        let mesh = Mesh1D::new(0.0, TAU, 16).unwrap();
        let cfg = RkdgConfig::new(1);
        let f = |a: f64| move |x: f64, o: &mut [f64]| o[0] = 1.0 + a * x.sin();
        let init = vec![l2_project(f(0.3), mesh, 1, 1), l2_project(f(0.6), mesh, 1, 1)];
        let sol = solve_ensemble(&Model::Burgers, init, &cfg, 0.4, Execution::Parallel).unwrap();
        let replay = solve_divp(&Model::Burgers, f(0.3), mesh, &cfg, &sol.partition).unwrap();
        assert_eq!(replay, sol.snapshots[0]);
        let seq = solve_ensemble(
            &Model::Burgers,
            vec![l2_project(f(0.3), mesh, 1, 1), l2_project(f(0.6), mesh, 1, 1)],
            &cfg,
            0.4,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(seq.snapshots, sol.snapshots);
    }

    #[test]
    fn cfl_violation_is_reported() {
        let mesh = Mesh1D::new(0.0, 1.0, 10).unwrap();
        let cfg = RkdgConfig::new(1);
        let part = TimePartition::new(vec![0.0, 0.5]).unwrap();
        let err = solve_divp(&Model::Burgers, |_, o| o[0] = 1.0, mesh, &cfg, &part).unwrap_err();
        assert!(matches!(err, SolverError::CflViolation { .. }));
    }

    #[test]
    fn dry_state_reports_time_and_cell() {
        let sw = Model::ShallowWater { gravity: 1.0 };
        let mesh = Mesh1D::new(0.0, TAU, 8).unwrap();
        let cfg = RkdgConfig::new(1);
        let u0 = l2_project(|x, o| {
            o[0] = 0.1 + x.sin();
            o[1] = 0.0;
        }, mesh, 1, 2);
        let err = solve_ensemble(&sw, vec![u0], &cfg, 0.1, Execution::Sequential).unwrap_err();
        assert!(matches!(err, SolverError::Inadmissible { .. }));
    }

    #[test]
    fn limiter_keeps_smooth_data_and_flattens_jumps() {
        let mesh = Mesh1D::new(0.0, TAU, 32).unwrap();
        let op = DgOperator::new(mesh, 1, 1);
        let mut smooth = l2_project(|x, o| o[0] = x.sin(), mesh, 1, 1);
        let before = smooth.clone();
        op.limit(Limiter::TvbMinmod { m: 50.0 }, &mut smooth);
        assert_eq!(smooth, before);

        let mut step = l2_project(|x, o| o[0] = if x < 3.0 { 1.0 } else { 0.0 }, mesh, 1, 1);
        op.limit(Limiter::TvbMinmod { m: 0.0 }, &mut step);
        let (j, _) = mesh.locate(3.0);
        // the cell holding the jump gets a slope no steeper than its neighbours allow
        let s = 3f64.sqrt() * step.cell(j)[1];
        let fwd = step.cell_mean(mesh.next(j))[0] - step.cell_mean(j)[0];
        assert!(s.abs() <= fwd.abs() + 1e-14);
    }

    #[test]
    fn partition_helpers() {
        let p = TimePartition::new(vec![0.0, 0.1, 0.3, 0.6]).unwrap();
        assert_eq!(p.nearest(0.29), 2);
        assert_eq!(p.locate(0.2).0, 1);
        assert!((p.locate(0.2).1 - 0.5).abs() < 1e-14);
        assert_eq!(p.locate(0.6), (2, 1.0));
        assert!(TimePartition::new(vec![0.0, 0.0]).is_err());
    }
}
