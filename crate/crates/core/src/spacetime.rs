//! Tensor Gauss quadrature over `(0, T) × domain` for piecewise (in time and
//! space) integrands.
//!
//! The driver visits interval → time point → cell → space point in a fixed
//! order and hands the kernel the product weight `(Δt w_t)(h w_x)`. Interval
//! partials come back in interval order, so cumulative sums are identical for
//! every execution policy.

use crate::exec::Execution;
use crate::mesh_dg::{C0Table, CellRule, Mesh1D};
use crate::rkdg::TimePartition;

#[derive(Debug, Clone)]
pub struct SpaceTimeRule {
    pub space: CellRule,
    pub time: CellRule,
    /// Continuous-space basis at the spatial points.
    pub table: C0Table,
}

impl SpaceTimeRule {
    /// `space_points` Gauss points per cell and `time_points` per interval,
    /// for continuous functions of degree `degree`.
    pub fn new(degree: usize, space_points: usize, time_points: usize) -> Self {
        let space = CellRule::gauss(space_points);
        let table = C0Table::new(degree, &space.xi);
        SpaceTimeRule {
            space,
            time: CellRule::gauss(time_points),
            table,
        }
    }

    /// `p + 3` points per cell and 3 per interval for DG degree `p`
    /// (reconstruction degree `p + 1`).
    pub fn for_dg_degree(p: usize) -> Self {
        Self::new(p + 1, p + 3, 3)
    }

    /// Time coordinates θ ∈ (0, 1) of the time points.
    pub fn thetas(&self) -> impl Iterator<Item = f64> + '_ {
        self.time.xi.iter().map(|x| 0.5 * (x + 1.0))
    }
}

pub trait SpaceTimeKernel: Sync {
    /// Per-(interval, time point) precomputation.
    type Slice;
    type Acc: Send;

    fn new_acc(&self) -> Self::Acc;
    fn prepare(&self, interval: usize, theta: f64) -> Self::Slice;
    fn accumulate(&self, slice: &Self::Slice, cell: usize, q: usize, weight: f64, acc: &mut Self::Acc);
}

/// One accumulator per time interval.
pub fn integrate<K: SpaceTimeKernel>(
    kernel: &K,
    mesh: &Mesh1D,
    partition: &TimePartition,
    rule: &SpaceTimeRule,
    exec: Execution,
) -> Vec<K::Acc> {
    let h = mesh.h();
    exec.map(partition.intervals(), |n| {
        let dt = partition.dt(n);
        let mut acc = kernel.new_acc();
        for (theta, &wt) in rule.thetas().zip(&rule.time.w) {
            let slice = kernel.prepare(n, theta);
            let tw = dt * wt;
            for cell in 0..mesh.cells {
                for (q, &wx) in rule.space.w.iter().enumerate() {
                    kernel.accumulate(&slice, cell, q, tw * (h * wx), &mut acc);
                }
            }
        }
        acc
    })
}

/// Running prefix sums `S_0 = 0, S_{n+1} = S_n + a_n`.
pub fn cumulative(partials: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(partials.len() + 1);
    let mut s = 0.0;
    out.push(s);
    for &a in partials {
        s += a;
        out.push(s);
    }
    out
}
