//! Orthonormal polynomial chaos on the parameter space and the discrete
//! (quadrature-based) spectral projection.
//!
//! Two densities are supported: the uniform density 1/2 on [-1, 1] with
//! normalised Legendre polynomials, and the standard normal density with
//! normalised probabilists' Hermite polynomials. Both bases obey the
//! symmetric three-term recurrence
//!
//! ```text
//! y Ψ_n(y) = b_{n+1} Ψ_{n+1}(y) + b_n Ψ_{n-1}(y),   Ψ_0 = 1,
//! ```
//!
//! and the Gauss rules are the eigen-decomposition of the associated Jacobi
//! matrix, polished by Newton iteration on Ψ_{R+1} with Christoffel weights.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::ShapeError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// ξ ~ U(-1, 1), Legendre polynomials.
    #[serde(rename = "uniform-legendre", alias = "uniform", alias = "legendre")]
    UniformLegendre,
    /// ξ ~ N(0, 1), Hermite polynomials.
    #[serde(rename = "gaussian-hermite", alias = "gaussian", alias = "hermite")]
    GaussianHermite,
}

impl Family {
    /// Off-diagonal Jacobi coefficient b_n (n ≥ 1).
    pub fn recurrence(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            Family::UniformLegendre => n / (4.0 * n * n - 1.0).sqrt(),
            Family::GaussianHermite => n.sqrt(),
        }
    }

    /// k-th raw moment E[ξ^k] of the density.
    pub fn moment(self, k: u32) -> f64 {
        if k % 2 == 1 {
            return 0.0;
        }
        match self {
            Family::UniformLegendre => 1.0 / (k as f64 + 1.0),
            Family::GaussianHermite => (1..k).step_by(2).map(|j| j as f64).product(),
        }
    }

    /// Bounded support, if any.
    pub fn support(self) -> Option<(f64, f64)> {
        match self {
            Family::UniformLegendre => Some((-1.0, 1.0)),
            Family::GaussianHermite => None,
        }
    }

    /// Dense sampling grid on Ξ used for sup-norm estimates: equispaced
    /// including the endpoints on bounded support, the `n`-point Gauss nodes
    /// otherwise.
    pub fn dense_grid(self, n: usize) -> Vec<f64> {
        match self.support() {
            Some((a, b)) if n > 1 => (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect(),
            Some((a, b)) => vec![0.5 * (a + b)],
            None => build_quadrature(self, n.saturating_sub(1)).nodes,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::UniformLegendre => "uniform-legendre",
            Family::GaussianHermite => "gaussian-hermite",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unsupported polynomial chaos family `{0}` (expected uniform-legendre or gaussian-hermite)")]
pub struct UnknownFamily(pub String);

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform-legendre" | "uniform" | "legendre" => Ok(Family::UniformLegendre),
            "gaussian-hermite" | "gaussian" | "normal" | "hermite" => Ok(Family::GaussianHermite),
            other => Err(UnknownFamily(other.to_string())),
        }
    }
}

/// Orthonormal family Ψ_0..Ψ_M for the density of `family`.
#[derive(Debug, Clone, PartialEq)]
pub struct GpcBasis {
    family: Family,
    max_degree: usize,
    b: Vec<f64>,
}

impl GpcBasis {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// Writes Ψ_0(y)..Ψ_{out.len()-1}(y) into `out`.
    ///
    /// Panics if `out` is longer than `max_degree + 1`.
    pub fn eval_into(&self, y: f64, out: &mut [f64]) {
        assert!(out.len() <= self.max_degree + 1, "degree beyond basis");
        eval_recurrence(&self.b, y, out);
    }

    pub fn values(&self, y: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.max_degree + 1];
        self.eval_into(y, &mut v);
        v
    }

    pub fn eval(&self, i: usize, y: f64) -> f64 {
        let mut v = vec![0.0; i + 1];
        self.eval_into(y, &mut v);
        v[i]
    }
}

fn eval_recurrence(b: &[f64], y: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() > 1 {
        out[1] = y / b[1];
    }
    for n in 1..out.len().saturating_sub(1) {
        out[n + 1] = (y * out[n] - b[n] * out[n - 1]) / b[n + 1];
    }
}

pub fn build_basis(family: Family, max_degree: usize) -> GpcBasis {
    let b = (0..=max_degree + 1)
        .map(|n| if n == 0 { 0.0 } else { family.recurrence(n) })
        .collect();
    GpcBasis {
        family,
        max_degree,
        b,
    }
}

/// (R+1)-point Gauss rule for the density of a family.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticQuadrature {
    pub family: Family,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl StochasticQuadrature {
    /// The order R (one less than the number of nodes).
    pub fn order(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest polynomial degree integrated exactly (2R+1).
    pub fn exactness(&self) -> usize {
        2 * self.order() + 1
    }

    /// Σ_l f(y_l) w_l with left-to-right summation.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let mut s = 0.0;
        for (&y, &w) in self.nodes.iter().zip(&self.weights) {
            s += f(y) * w;
        }
        s
    }
}

pub fn build_quadrature(family: Family, order: usize) -> StochasticQuadrature {
    let n = order + 1;
    let b: Vec<f64> = (0..=n)
        .map(|k| if k == 0 { 0.0 } else { family.recurrence(k) })
        .collect();

    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        jacobi[(k, k - 1)] = b[k];
        jacobi[(k - 1, k)] = b[k];
    }
    let mut nodes: Vec<f64> = jacobi.symmetric_eigenvalues().iter().copied().collect();
    nodes.sort_by(|a, b| a.total_cmp(b));

    let mut vals = vec![0.0; n + 1];
    let mut ders = vec![0.0; n + 1];
    for y in nodes.iter_mut() {
        for _ in 0..8 {
            eval_with_derivative(&b, *y, &mut vals, &mut ders);
            let step = vals[n] / ders[n];
            *y -= step;
            if step.abs() <= 1e-16 * y.abs().max(1.0) {
                break;
            }
        }
    }

    // Both densities are symmetric about zero.
    for l in 0..n / 2 {
        let a = 0.5 * (nodes[n - 1 - l] - nodes[l]);
        nodes[l] = -a;
        nodes[n - 1 - l] = a;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }

    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&y| {
            eval_recurrence(&b, y, &mut vals[..n]);
            1.0 / vals[..n].iter().map(|v| v * v).sum::<f64>()
        })
        .collect();
    for l in 0..n / 2 {
        let w = 0.5 * (weights[l] + weights[n - 1 - l]);
        weights[l] = w;
        weights[n - 1 - l] = w;
    }

    StochasticQuadrature {
        family,
        nodes,
        weights,
    }
}

fn eval_with_derivative(b: &[f64], y: f64, vals: &mut [f64], ders: &mut [f64]) {
    vals[0] = 1.0;
    ders[0] = 0.0;
    if vals.len() > 1 {
        vals[1] = y / b[1];
        ders[1] = 1.0 / b[1];
    }
    for n in 1..vals.len() - 1 {
        vals[n + 1] = (y * vals[n] - b[n] * vals[n - 1]) / b[n + 1];
        ders[n + 1] = (vals[n] + y * ders[n] - b[n] * ders[n - 1]) / b[n + 1];
    }
}

/// Table `c[j][l] = Ψ_j(y_l) w_l` for j = 0..=max_mode.
pub fn projection_weights(
    basis: &GpcBasis,
    quad: &StochasticQuadrature,
    max_mode: usize,
) -> Vec<Vec<f64>> {
    let mut psi = vec![0.0; max_mode + 1];
    let mut table = vec![vec![0.0; quad.len()]; max_mode + 1];
    for (l, (&y, &w)) in quad.nodes.iter().zip(&quad.weights).enumerate() {
        basis.eval_into(y, &mut psi);
        for j in 0..=max_mode {
            table[j][l] = psi[j] * w;
        }
    }
    table
}

/// Discrete orthogonal projection: v̂_i = Σ_l v(y_l) Ψ_i(y_l) w_l, i = 0..=M.
pub fn discrete_projection<S: AsRef<[f64]>>(
    samples: &[S],
    basis: &GpcBasis,
    quad: &StochasticQuadrature,
    max_mode: usize,
) -> Result<Vec<Vec<f64>>, ShapeError> {
    if samples.len() != quad.len() {
        return Err(ShapeError::Mismatch {
            what: "samples per quadrature node",
            expected: quad.len(),
            got: samples.len(),
        });
    }
    if max_mode > basis.max_degree() {
        return Err(ShapeError::Incompatible(format!(
            "mode {max_mode} exceeds basis degree {}",
            basis.max_degree()
        )));
    }
    let m = samples.first().map_or(0, |s| s.as_ref().len());
    if let Some(bad) = samples.iter().find(|s| s.as_ref().len() != m) {
        return Err(ShapeError::Mismatch {
            what: "sample components",
            expected: m,
            got: bad.as_ref().len(),
        });
    }
    let table = projection_weights(basis, quad, max_mode);
    Ok(table
        .iter()
        .map(|row| {
            let mut mode = vec![0.0; m];
            for (s, &c) in samples.iter().zip(row) {
                for (acc, &v) in mode.iter_mut().zip(s.as_ref()) {
                    *acc += v * c;
                }
            }
            mode
        })
        .collect())
}

/// Truncated expansion Σ_{i=0}^{M} v̂_i Ψ_i(y).
pub fn expansion_eval<S: AsRef<[f64]>>(modes: &[S], basis: &GpcBasis, y: f64) -> Vec<f64> {
    let m = modes.first().map_or(0, |s| s.as_ref().len());
    let mut psi = vec![0.0; modes.len()];
    basis.eval_into(y, &mut psi);
    let mut out = vec![0.0; m];
    for (mode, &p) in modes.iter().zip(&psi) {
        for (o, &v) in out.iter_mut().zip(mode.as_ref()) {
            *o += v * p;
        }
    }
    out
}
