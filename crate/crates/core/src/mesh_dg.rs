//! Periodic uniform meshes, the broken polynomial space and its continuous
//! subspace.
//!
//! A [`DgFunction`] stores, per cell, coefficients in the orthonormal
//! Legendre basis `φ_k(ξ) = √(2k+1) P_k(ξ)` on the reference cell `[-1, 1]`,
//! normalised so that `(1/h) ∫_K φ_j φ_k dx = δ_jk`. The zeroth coefficient
//! is therefore the cell mean.
//!
//! A [`ContinuousPiecewisePoly`] stores one value per interface (shared by the
//! two neighbouring cells) plus interior bubbles `B_k = P_k − P_{k−2}`,
//! `k = 2..=q`, which vanish at both cell ends. Interface continuity is exact
//! by storage.

use serde::{Deserialize, Serialize};

use crate::error::ShapeError;
use crate::gpc::{build_quadrature, Family};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mesh1D {
    pub x_min: f64,
    pub x_max: f64,
    pub cells: usize,
}

impl Mesh1D {
    pub fn new(x_min: f64, x_max: f64, cells: usize) -> Result<Self, ShapeError> {
        if cells == 0 || !(x_max > x_min) {
            return Err(ShapeError::Incompatible(format!(
                "mesh needs a positive length and cell count, got [{x_min}, {x_max}] with {cells} cells"
            )));
        }
        Ok(Mesh1D {
            x_min,
            x_max,
            cells,
        })
    }

    pub fn h(&self) -> f64 {
        (self.x_max - self.x_min) / self.cells as f64
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    /// Left end of cell `j`.
    pub fn cell_left(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.h()
    }

    pub fn x_of(&self, cell: usize, xi: f64) -> f64 {
        self.cell_left(cell) + 0.5 * (xi + 1.0) * self.h()
    }

    /// Cell index and reference coordinate of `x`, with periodic wrapping.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let len = self.length();
        let mut s = (x - self.x_min) % len;
        if s < 0.0 {
            s += len;
        }
        let h = self.h();
        let j = ((s / h).floor() as usize).min(self.cells - 1);
        let xi = (2.0 * (s - j as f64 * h) / h - 1.0).clamp(-1.0, 1.0);
        (j, xi)
    }

    /// Right neighbour, periodic.
    pub fn next(&self, j: usize) -> usize {
        (j + 1) % self.cells
    }

    /// Left neighbour, periodic.
    pub fn prev(&self, j: usize) -> usize {
        (j + self.cells - 1) % self.cells
    }
}

/// Legendre values `P_0..P_n(ξ)` and derivatives.
pub fn legendre(xi: f64, vals: &mut [f64], ders: &mut [f64]) {
    let n = vals.len();
    if n == 0 {
        return;
    }
    vals[0] = 1.0;
    ders[0] = 0.0;
    if n > 1 {
        vals[1] = xi;
        ders[1] = 1.0;
    }
    for k in 1..n.saturating_sub(1) {
        let kf = k as f64;
        vals[k + 1] = ((2.0 * kf + 1.0) * xi * vals[k] - kf * vals[k - 1]) / (kf + 1.0);
        ders[k + 1] = ders[k - 1] + (2.0 * kf + 1.0) * vals[k];
    }
}

/// Gauss-Legendre rule on `[-1, 1]` with weights summing to one, so that
/// `∫_K f dx ≈ h Σ_q w_q f(x_q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellRule {
    pub xi: Vec<f64>,
    pub w: Vec<f64>,
}

impl CellRule {
    pub fn gauss(points: usize) -> Self {
        let q = build_quadrature(Family::UniformLegendre, points.max(1) - 1);
        CellRule {
            xi: q.nodes,
            w: q.weights,
        }
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }
}

/// Orthonormal DG basis values/derivatives (w.r.t. ξ) at a point set,
/// `vals[q * (p+1) + k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DgTable {
    pub n_basis: usize,
    pub vals: Vec<f64>,
    pub ders: Vec<f64>,
}

impl DgTable {
    pub fn new(degree: usize, points: &[f64]) -> Self {
        let nb = degree + 1;
        let mut vals = vec![0.0; points.len() * nb];
        let mut ders = vec![0.0; points.len() * nb];
        let (mut p, mut dp) = (vec![0.0; nb], vec![0.0; nb]);
        for (q, &xi) in points.iter().enumerate() {
            legendre(xi, &mut p, &mut dp);
            for k in 0..nb {
                let s = ((2 * k + 1) as f64).sqrt();
                vals[q * nb + k] = s * p[k];
                ders[q * nb + k] = s * dp[k];
            }
        }
        DgTable {
            n_basis: nb,
            vals,
            ders,
        }
    }
}

/// Continuous-space local basis `[hat_L, hat_R, B_2..B_q]` at a point set.
#[derive(Debug, Clone, PartialEq)]
pub struct C0Table {
    pub n_local: usize,
    pub vals: Vec<f64>,
    pub ders: Vec<f64>,
}

impl C0Table {
    pub fn new(degree: usize, points: &[f64]) -> Self {
        let nl = degree + 1;
        let mut vals = vec![0.0; points.len() * nl];
        let mut ders = vec![0.0; points.len() * nl];
        let (mut p, mut dp) = (vec![0.0; nl], vec![0.0; nl]);
        for (q, &xi) in points.iter().enumerate() {
            legendre(xi, &mut p, &mut dp);
            let row = q * nl;
            vals[row] = 0.5 * (1.0 - xi);
            vals[row + 1] = 0.5 * (1.0 + xi);
            ders[row] = -0.5;
            ders[row + 1] = 0.5;
            for k in 2..nl {
                vals[row + k] = p[k] - p[k - 2];
                ders[row + k] = dp[k] - dp[k - 2];
            }
        }
        C0Table {
            n_local: nl,
            vals,
            ders,
        }
    }
}

/// Common evaluation interface of the two piecewise polynomial spaces.
pub trait PiecewisePoly {
    fn mesh(&self) -> &Mesh1D;
    fn degree(&self) -> usize;
    fn components(&self) -> usize;
    /// Value at reference coordinate `xi` of `cell`.
    fn eval_local(&self, cell: usize, xi: f64, out: &mut [f64]);

    fn eval(&self, x: f64, out: &mut [f64]) {
        let (j, xi) = self.mesh().locate(x);
        self.eval_local(j, xi, out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DgFunction {
    mesh: Mesh1D,
    degree: usize,
    m: usize,
    coeffs: Vec<f64>,
}

impl DgFunction {
    pub fn zeros(mesh: Mesh1D, degree: usize, m: usize) -> Self {
        DgFunction {
            mesh,
            degree,
            m,
            coeffs: vec![0.0; mesh.cells * (degree + 1) * m],
        }
    }

    pub fn from_coefficients(
        mesh: Mesh1D,
        degree: usize,
        m: usize,
        coeffs: Vec<f64>,
    ) -> Result<Self, ShapeError> {
        let expected = mesh.cells * (degree + 1) * m;
        if coeffs.len() != expected {
            return Err(ShapeError::Mismatch {
                what: "DG coefficients",
                expected,
                got: coeffs.len(),
            });
        }
        Ok(DgFunction {
            mesh,
            degree,
            m,
            coeffs,
        })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coefficients_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    /// Coefficient block of `cell`, laid out `[k * m + c]`.
    pub fn cell(&self, cell: usize) -> &[f64] {
        let n = (self.degree + 1) * self.m;
        &self.coeffs[cell * n..(cell + 1) * n]
    }

    pub fn cell_mut(&mut self, cell: usize) -> &mut [f64] {
        let n = (self.degree + 1) * self.m;
        &mut self.coeffs[cell * n..(cell + 1) * n]
    }

    pub fn cell_mean(&self, cell: usize) -> &[f64] {
        &self.cell(cell)[..self.m]
    }

    /// `∫ u dx` per component.
    pub fn total(&self) -> Vec<f64> {
        let h = self.mesh.h();
        let mut t = vec![0.0; self.m];
        for j in 0..self.mesh.cells {
            for (acc, v) in t.iter_mut().zip(self.cell_mean(j)) {
                *acc += h * v;
            }
        }
        t
    }

    pub fn same_space(&self, other: &DgFunction) -> bool {
        self.mesh == other.mesh && self.degree == other.degree && self.m == other.m
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &DgFunction) {
        debug_assert!(self.same_space(other));
        for (s, o) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= a);
    }

    /// Value at the `q`-th point of `table` inside `cell`.
    pub fn eval_table(&self, cell: usize, table: &DgTable, q: usize, out: &mut [f64]) {
        let m = self.m;
        let block = self.cell(cell);
        let phi = &table.vals[q * table.n_basis..(q + 1) * table.n_basis];
        out[..m].fill(0.0);
        for (k, &pk) in phi.iter().enumerate() {
            for c in 0..m {
                out[c] += block[k * m + c] * pk;
            }
        }
    }
}

impl PiecewisePoly for DgFunction {
    fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }
    fn degree(&self) -> usize {
        self.degree
    }
    fn components(&self) -> usize {
        self.m
    }
    fn eval_local(&self, cell: usize, xi: f64, out: &mut [f64]) {
        let table = DgTable::new(self.degree, &[xi]);
        self.eval_table(cell, &table, 0, out);
    }
}

/// Globally continuous piecewise polynomial of degree `q ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousPiecewisePoly {
    mesh: Mesh1D,
    degree: usize,
    m: usize,
    data: Vec<f64>,
}

impl ContinuousPiecewisePoly {
    pub fn zeros(mesh: Mesh1D, degree: usize, m: usize) -> Self {
        assert!(degree >= 1, "continuous space needs degree ≥ 1");
        ContinuousPiecewisePoly {
            mesh,
            degree,
            m,
            data: vec![0.0; mesh.cells * degree * m],
        }
    }

    /// Interface values (left end of each cell) followed by bubble
    /// coefficients `[(cell*(q-1) + k-2) * m + c]`.
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Value at the interface at the left end of cell `j`.
    pub fn node(&self, j: usize) -> &[f64] {
        &self.data[j * self.m..(j + 1) * self.m]
    }

    pub fn node_mut(&mut self, j: usize) -> &mut [f64] {
        let m = self.m;
        &mut self.data[j * m..(j + 1) * m]
    }

    fn bubble_offset(&self, cell: usize) -> usize {
        self.mesh.cells * self.m + cell * (self.degree - 1) * self.m
    }

    /// Bubble block of `cell`, laid out `[(k-2) * m + c]`.
    pub fn bubbles(&self, cell: usize) -> &[f64] {
        let o = self.bubble_offset(cell);
        &self.data[o..o + (self.degree - 1) * self.m]
    }

    pub fn bubbles_mut(&mut self, cell: usize) -> &mut [f64] {
        let o = self.bubble_offset(cell);
        let n = (self.degree - 1) * self.m;
        &mut self.data[o..o + n]
    }

    pub fn same_space(&self, other: &ContinuousPiecewisePoly) -> bool {
        self.mesh == other.mesh && self.degree == other.degree && self.m == other.m
    }

    pub fn axpy(&mut self, a: f64, other: &ContinuousPiecewisePoly) {
        debug_assert!(self.same_space(other));
        for (s, o) in self.data.iter_mut().zip(&other.data) {
            *s += a * o;
        }
    }

    pub fn scale(&mut self, a: f64) {
        self.data.iter_mut().for_each(|c| *c *= a);
    }

    /// `Σ_s coef_s · f_s`, accumulated from zero in the given order.
    pub fn combination(parts: &[(&ContinuousPiecewisePoly, f64)]) -> Self {
        let first = parts[0].0;
        let mut out = ContinuousPiecewisePoly::zeros(first.mesh, first.degree, first.m);
        for (f, w) in parts {
            out.axpy(*w, f);
        }
        out
    }

    /// Local coefficients `[wL, wR, bubbles...]` of component `c` in `cell`.
    fn local(&self, cell: usize, c: usize, k: usize) -> f64 {
        match k {
            0 => self.node(cell)[c],
            1 => self.node(self.mesh.next(cell))[c],
            _ => self.bubbles(cell)[(k - 2) * self.m + c],
        }
    }

    /// Value and x-derivative at the `q`-th point of `table` inside `cell`.
    pub fn eval_table(
        &self,
        cell: usize,
        table: &C0Table,
        q: usize,
        val: &mut [f64],
        dx: &mut [f64],
    ) {
        let nl = table.n_local;
        let phi = &table.vals[q * nl..(q + 1) * nl];
        let dphi = &table.ders[q * nl..(q + 1) * nl];
        let scale = 2.0 / self.mesh.h();
        for c in 0..self.m {
            let mut v = 0.0;
            let mut d = 0.0;
            for k in 0..nl {
                let a = self.local(cell, c, k);
                v += a * phi[k];
                d += a * dphi[k];
            }
            val[c] = v;
            dx[c] = d * scale;
        }
    }

    /// [`Self::eval_table`] for a linear combination `Σ_s coef_s · f_s` of
    /// functions in the same space, without forming the combination.
    pub fn eval_table_combined(
        parts: &[(&ContinuousPiecewisePoly, f64)],
        cell: usize,
        table: &C0Table,
        q: usize,
        val: &mut [f64],
        dx: &mut [f64],
    ) {
        let first = parts[0].0;
        let (m, nl) = (first.m, table.n_local);
        let phi = &table.vals[q * nl..(q + 1) * nl];
        let dphi = &table.ders[q * nl..(q + 1) * nl];
        let scale = 2.0 / first.mesh.h();
        for c in 0..m {
            let mut v = 0.0;
            let mut d = 0.0;
            for k in 0..nl {
                let mut a = 0.0;
                for (f, w) in parts {
                    a += w * f.local(cell, c, k);
                }
                v += a * phi[k];
                d += a * dphi[k];
            }
            val[c] = v;
            dx[c] = d * scale;
        }
    }
}

impl PiecewisePoly for ContinuousPiecewisePoly {
    fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }
    fn degree(&self) -> usize {
        self.degree
    }
    fn components(&self) -> usize {
        self.m
    }
    fn eval_local(&self, cell: usize, xi: f64, out: &mut [f64]) {
        let table = C0Table::new(self.degree, &[xi]);
        let mut dx = vec![0.0; self.m];
        self.eval_table(cell, &table, 0, out, &mut dx);
    }
}

/// Cellwise L² projection of `g` onto the degree-`p` broken space using
/// `p + 2` Gauss points per cell.
pub fn l2_project(
    g: impl Fn(f64, &mut [f64]),
    mesh: Mesh1D,
    p: usize,
    m: usize,
) -> DgFunction {
    let rule = CellRule::gauss(p + 2);
    let table = DgTable::new(p, &rule.xi);
    let mut f = DgFunction::zeros(mesh, p, m);
    let mut gv = vec![0.0; m];
    for j in 0..mesh.cells {
        let block = f.cell_mut(j);
        for (q, (&xi, &w)) in rule.xi.iter().zip(&rule.w).enumerate() {
            g(mesh.x_of(j, xi), &mut gv);
            for k in 0..=p {
                let phi = table.vals[q * (p + 1) + k];
                for c in 0..m {
                    block[k * m + c] += w * gv[c] * phi;
                }
            }
        }
    }
    f
}

/// Projection matching the cell moments of degree `≤ p−1` and the value of
/// `g` at one end of each cell (`right(cell, component)` selects the right
/// end). Degree 0 falls back to [`l2_project`].
pub fn radau_project(
    g: impl Fn(f64, &mut [f64]),
    mesh: Mesh1D,
    p: usize,
    m: usize,
    mut right: impl FnMut(usize, usize) -> bool,
) -> DgFunction {
    let mut f = l2_project(&g, mesh, p, m);
    if p == 0 {
        return f;
    }
    let ends = DgTable::new(p, &[-1.0, 1.0]);
    let nb = p + 1;
    let (mut gl, mut gr) = (vec![0.0; m], vec![0.0; m]);
    for j in 0..mesh.cells {
        g(mesh.x_of(j, -1.0), &mut gl);
        g(mesh.x_of(j, 1.0), &mut gr);
        let block = f.cell_mut(j);
        for c in 0..m {
            let (row, target) = if right(j, c) { (nb, gr[c]) } else { (0, gl[c]) };
            let lower: f64 = (0..p).map(|k| block[k * m + c] * ends.vals[row + k]).sum();
            block[p * m + c] = (target - lower) / ends.vals[row + p];
        }
    }
    f
}

/// L² norm and sampled sup-norm (Euclidean over components) of a piecewise
/// polynomial. The sup is taken over the Gauss points and both cell ends and
/// is a lower estimate of the true maximum.
pub fn dg_norms<F: PiecewisePoly + ?Sized>(f: &F) -> (f64, f64) {
    let mesh = *f.mesh();
    let m = f.components();
    let rule = CellRule::gauss(f.degree() + 2);
    let mut v = vec![0.0; m];
    let (mut l2, mut sup) = (0.0, 0.0f64);
    for j in 0..mesh.cells {
        for (&xi, &w) in rule.xi.iter().zip(&rule.w) {
            f.eval_local(j, xi, &mut v);
            let n2: f64 = v.iter().map(|a| a * a).sum();
            l2 += mesh.h() * w * n2;
            sup = sup.max(n2.sqrt());
        }
        for xi in [-1.0, 1.0] {
            f.eval_local(j, xi, &mut v);
            sup = sup.max(v.iter().map(|a| a * a).sum::<f64>().sqrt());
        }
    }
    (l2.sqrt(), sup)
}

/// `‖f − g‖_{L²}` with `points` Gauss points per cell.
pub fn l2_error<F: PiecewisePoly + ?Sized>(
    f: &F,
    g: impl Fn(f64, &mut [f64]),
    points: usize,
) -> f64 {
    let mesh = *f.mesh();
    let m = f.components();
    let rule = CellRule::gauss(points);
    let (mut a, mut b) = (vec![0.0; m], vec![0.0; m]);
    let mut s = 0.0;
    for j in 0..mesh.cells {
        for (&xi, &w) in rule.xi.iter().zip(&rule.w) {
            f.eval_local(j, xi, &mut a);
            g(mesh.x_of(j, xi), &mut b);
            let d2: f64 = a.iter().zip(&b).map(|(p, q)| (p - q) * (p - q)).sum();
            s += mesh.h() * w * d2;
        }
    }
    s.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn constants_project_exactly() {
        let mesh = Mesh1D::new(0.0, 1.0, 7).unwrap();
        let f = l2_project(|_, o| o[0] = 3.5, mesh, 2, 1);
        for j in 0..7 {
            assert!((f.cell(j)[0] - 3.5).abs() < 1e-14);
            assert!(f.cell(j)[1].abs() < 1e-14 && f.cell(j)[2].abs() < 1e-14);
        }
    }

    #[test]
    fn polynomials_are_reproduced() {
        let mesh = Mesh1D::new(-1.0, 2.0, 5).unwrap();
        let f = l2_project(|x, o| o[0] = x, mesh, 1, 1);
        let mut v = [0.0];
        for i in 0..20 {
            let x = -0.97 + 0.147 * i as f64;
            let (j, xi) = mesh.locate(x);
            f.eval_local(j, xi, &mut v);
            assert!((v[0] - x).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_error_converges_at_p_plus_one() {
        let err = |n| {
            let mesh = Mesh1D::new(0.0, TAU, n).unwrap();
            let f = l2_project(|x, o| o[0] = x.sin(), mesh, 1, 1);
            l2_error(&f, |x, o| o[0] = x.sin(), 8)
        };
        let ratio = err(32) / err(64);
        assert!((ratio / 4.0 - 1.0).abs() < 0.15, "ratio {ratio}");
    }

    #[test]
    fn projection_is_idempotent() {
        let mesh = Mesh1D::new(0.0, TAU, 9).unwrap();
        let f = l2_project(|x, o| o[0] = (2.0 * x).cos() + x, mesh, 3, 1);
        let g = l2_project(
            |x, o| {
                // evaluate from the owning cell's interior to avoid the interface tie
                let (j, xi) = mesh.locate(x);
                f.eval_local(j, xi, o)
            },
            mesh,
            3,
            1,
        );
        for (a, b) in f.coefficients().iter().zip(g.coefficients()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn norms() {
        let mesh = Mesh1D::new(0.0, TAU, 4).unwrap();
        let z = DgFunction::zeros(mesh, 1, 1);
        assert_eq!(dg_norms(&z), (0.0, 0.0));
        let c = l2_project(|_, o| o[0] = 3.0, mesh, 1, 1);
        let (l2, sup) = dg_norms(&c);
        assert!((l2 - 3.0 * TAU.sqrt()).abs() < 1e-13);
        assert!((sup - 3.0).abs() < 1e-14);

        let unit = Mesh1D::new(0.0, 1.0, 1).unwrap();
        let x = l2_project(|x, o| o[0] = x, unit, 1, 1);
        assert!((dg_norms(&x).0 - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn continuous_function_is_periodic_and_continuous() {
        let mesh = Mesh1D::new(0.0, 2.0, 4).unwrap();
        let mut f = ContinuousPiecewisePoly::zeros(mesh, 3, 1);
        for (i, v) in f.data_mut().iter_mut().enumerate() {
            *v = (i as f64 * 0.37).sin();
        }
        let (mut a, mut b) = ([0.0], [0.0]);
        f.eval_local(3, 1.0, &mut a);
        f.eval_local(0, -1.0, &mut b);
        assert_eq!(a, b);
        f.eval(2.0, &mut a);
        f.eval(0.0, &mut b);
        assert_eq!(a, b);
        for j in 0..4 {
            f.eval_local(j, 1.0, &mut a);
            f.eval_local(mesh.next(j), -1.0, &mut b);
            assert_eq!(a, b);
        }
    }

    #[test]
    fn locate_wraps() {
        let mesh = Mesh1D::new(0.0, 1.0, 4).unwrap();
        let (j, xi) = mesh.locate(0.3);
        assert_eq!(j, 1);
        assert!((xi + 0.6).abs() < 1e-12);
        let (j, xi) = mesh.locate(1.3);
        assert_eq!(j, 1);
        assert!((xi + 0.6).abs() < 1e-12);
        let (j, _) = mesh.locate(-0.1);
        assert_eq!(j, 3);
    }

    #[test]
    fn radau_projection_matches_end_values_and_low_moments() {
        let mesh = Mesh1D::new(0.0, TAU, 6).unwrap();
        let g = |x: f64, o: &mut [f64]| o[0] = x.sin() + 0.3 * x;
        let l2 = l2_project(g, mesh, 2, 1);
        let f = radau_project(g, mesh, 2, 1, |j, _| j % 2 == 0);
        let mut v = [0.0];
        for j in 0..6 {
            let end = if j % 2 == 0 { 1.0 } else { -1.0 };
            f.eval_local(j, end, &mut v);
            let mut e = [0.0];
            g(mesh.x_of(j, end), &mut e);
            assert!((v[0] - e[0]).abs() < 1e-13);
            assert!((f.cell(j)[0] - l2.cell(j)[0]).abs() < 1e-15);
            assert!((f.cell(j)[1] - l2.cell(j)[1]).abs() < 1e-15);
        }
        let q = radau_project(|x, o| o[0] = x * x, mesh, 2, 1, |_, _| true);
        let r = l2_project(|x, o| o[0] = x * x, mesh, 2, 1);
        for (a, b) in q.coefficients().iter().zip(r.coefficients()) {
            assert!((a - b).abs() < 1e-11);
        }
    }
}
