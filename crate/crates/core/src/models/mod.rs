//! Conservation-law systems `∂_t u + ∂_x F(u) = 0` with an entropy pair, and
//! the compact-set Hessian constants entering the error bound.

mod burgers;
mod linear;
mod shallow_water;

pub mod exact;
pub mod profile;

use serde::{Deserialize, Serialize};

pub use burgers::Burgers;
pub use linear::LinearAdvection;
pub use shallow_water::ShallowWater;

use crate::error::ModelError;

/// A point value of the conserved quantities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector(pub Vec<f64>);

impl StateVector {
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for StateVector {
    fn from(v: Vec<f64>) -> Self {
        StateVector(v)
    }
}

/// A strictly hyperbolic system with an entropy/entropy-flux pair.
///
/// Matrices are row-major `m × m`; the flux Hessian is stored as
/// `hess[k*m*m + i*m + j] = ∂²F_k / ∂u_i ∂u_j`.
pub trait ConservationLaw: Send + Sync {
    fn system_size(&self) -> usize;

    fn name(&self) -> &str;

    /// Ok if `u` lies in the state space.
    fn check_admissible(&self, u: &[f64]) -> Result<(), ModelError>;

    fn flux(&self, u: &[f64], out: &mut [f64]);
    fn flux_jacobian(&self, u: &[f64], out: &mut [f64]);
    fn flux_hessian(&self, u: &[f64], out: &mut [f64]);

    fn entropy(&self, u: &[f64]) -> f64;
    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]);
    fn entropy_hessian(&self, u: &[f64], out: &mut [f64]);
    fn entropy_flux(&self, u: &[f64]) -> f64;

    /// Spectral radius of the flux Jacobian.
    fn max_wave_speed(&self, u: &[f64]) -> f64;

    /// Closed-form `(c_flux, eta_lower, eta_upper)` on a box, when known.
    fn analytic_hessian_bounds(&self, _bounds: &CompactBox) -> Option<(f64, f64, f64)> {
        None
    }
}

/// `F(u)` with an admissibility check.
pub fn flux_eval<M: ConservationLaw + ?Sized>(
    model: &M,
    u: &StateVector,
) -> Result<Vec<f64>, ModelError> {
    let m = model.system_size();
    if u.0.len() != m {
        return Err(ModelError::WrongSize {
            expected: m,
            got: u.0.len(),
        });
    }
    model.check_admissible(&u.0)?;
    let mut out = vec![0.0; m];
    model.flux(&u.0, &mut out);
    Ok(out)
}

/// The bundled systems, selectable from configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Model {
    Burgers,
    LinearAdvection { velocity: f64 },
    ShallowWater { gravity: f64 },
}

macro_rules! dispatch {
    ($self:ident, $m:ident => $e:expr) => {
        match *$self {
            Model::Burgers => {
                let $m = Burgers;
                $e
            }
            Model::LinearAdvection { velocity } => {
                let $m = LinearAdvection { velocity };
                $e
            }
            Model::ShallowWater { gravity } => {
                let $m = ShallowWater { gravity };
                $e
            }
        }
    };
}

impl ConservationLaw for Model {
    fn system_size(&self) -> usize {
        dispatch!(self, m => m.system_size())
    }
    fn name(&self) -> &str {
        match self {
            Model::Burgers => "burgers",
            Model::LinearAdvection { .. } => "linear-advection",
            Model::ShallowWater { .. } => "shallow-water",
        }
    }
    fn check_admissible(&self, u: &[f64]) -> Result<(), ModelError> {
        dispatch!(self, m => m.check_admissible(u))
    }
    fn flux(&self, u: &[f64], out: &mut [f64]) {
        dispatch!(self, m => m.flux(u, out))
    }
    fn flux_jacobian(&self, u: &[f64], out: &mut [f64]) {
        dispatch!(self, m => m.flux_jacobian(u, out))
    }
    fn flux_hessian(&self, u: &[f64], out: &mut [f64]) {
        dispatch!(self, m => m.flux_hessian(u, out))
    }
    fn entropy(&self, u: &[f64]) -> f64 {
        dispatch!(self, m => m.entropy(u))
    }
    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]) {
        dispatch!(self, m => m.entropy_gradient(u, out))
    }
    fn entropy_hessian(&self, u: &[f64], out: &mut [f64]) {
        dispatch!(self, m => m.entropy_hessian(u, out))
    }
    fn entropy_flux(&self, u: &[f64]) -> f64 {
        dispatch!(self, m => m.entropy_flux(u))
    }
    fn max_wave_speed(&self, u: &[f64]) -> f64 {
        dispatch!(self, m => m.max_wave_speed(u))
    }
    fn analytic_hessian_bounds(&self, bounds: &CompactBox) -> Option<(f64, f64, f64)> {
        dispatch!(self, m => m.analytic_hessian_bounds(bounds))
    }
}

/// Componentwise box `[lower, upper]` standing in for the convex compact set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompactBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl CompactBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, ModelError> {
        if lower.len() != upper.len() {
            return Err(ModelError::InvalidBox(format!(
                "lower has {} components, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(k) = (0..lower.len()).find(|&k| !(lower[k] <= upper[k])) {
            return Err(ModelError::InvalidBox(format!(
                "component {k}: lower {} > upper {}",
                lower[k], upper[k]
            )));
        }
        Ok(CompactBox { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn diameter(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }

    pub fn contains(&self, u: &[f64]) -> bool {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&v, (&a, &b))| a <= v && v <= b)
    }

    /// True when `other` lies inside this box.
    pub fn covers(&self, other: &CompactBox) -> bool {
        self.contains(&other.lower) && self.contains(&other.upper)
    }

    /// Widens every side by `fraction` of the diameter.
    pub fn inflate(&self, fraction: f64) -> CompactBox {
        let pad = fraction * self.diameter();
        CompactBox {
            lower: self.lower.iter().map(|a| a - pad).collect(),
            upper: self.upper.iter().map(|b| b + pad).collect(),
        }
    }

    /// Tensor grid with `per_axis` points along every component.
    pub fn grid(&self, per_axis: usize) -> Vec<Vec<f64>> {
        let m = self.dim();
        let n = per_axis.max(1);
        let total = n.pow(m as u32);
        (0..total)
            .map(|mut idx| {
                (0..m)
                    .map(|k| {
                        let i = idx % n;
                        idx /= n;
                        if n == 1 {
                            0.5 * (self.lower[k] + self.upper[k])
                        } else {
                            self.lower[k] + (self.upper[k] - self.lower[k]) * i as f64 / (n - 1) as f64
                        }
                    })
                    .collect()
            })
            .collect()
    }
}

/// Running componentwise min/max of visited states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateRange {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl StateRange {
    pub fn empty(m: usize) -> Self {
        StateRange {
            lower: vec![f64::INFINITY; m],
            upper: vec![f64::NEG_INFINITY; m],
        }
    }

    pub fn include(&mut self, u: &[f64]) {
        for ((lo, hi), &v) in self.lower.iter_mut().zip(self.upper.iter_mut()).zip(u) {
            *lo = lo.min(v);
            *hi = hi.max(v);
        }
    }

    pub fn merge(&mut self, other: &StateRange) {
        self.include(&other.lower.clone());
        self.include(&other.upper.clone());
    }

    pub fn is_empty(&self) -> bool {
        self.lower.iter().zip(&self.upper).any(|(a, b)| a > b)
    }

    pub fn to_box(&self) -> Result<CompactBox, ModelError> {
        CompactBox::new(self.lower.clone(), self.upper.clone())
    }
}

/// Componentwise range of `range` inflated by 10% of its diameter.
///
/// Sides that would leave the admissible set are pulled back halfway towards
/// the observed range, repeatedly.
pub fn build_compact_box<M: ConservationLaw + ?Sized>(
    model: &M,
    range: &StateRange,
) -> Result<CompactBox, ModelError> {
    let tight = range.to_box()?;
    let pad = 0.1 * tight.diameter();
    let mut lower: Vec<f64> = tight.lower.iter().map(|a| a - pad).collect();
    let mut upper: Vec<f64> = tight.upper.iter().map(|b| b + pad).collect();
    for _ in 0..60 {
        let candidate = CompactBox::new(lower.clone(), upper.clone())?;
        if box_admissible(model, &candidate) {
            return Ok(candidate);
        }
        for k in 0..lower.len() {
            lower[k] = 0.5 * (lower[k] + tight.lower[k]);
            upper[k] = 0.5 * (upper[k] + tight.upper[k]);
        }
    }
    let candidate = tight;
    if box_admissible(model, &candidate) {
        Ok(candidate)
    } else {
        Err(ModelError::InvalidBox(
            "observed states are not admissible".into(),
        ))
    }
}

fn box_admissible<M: ConservationLaw + ?Sized>(model: &M, b: &CompactBox) -> bool {
    b.grid(2).iter().all(|u| model.check_admissible(u).is_ok())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundMethod {
    Analytic,
    Sampled,
}

/// Constants with `|vᵀHF(u)v| ≤ c_flux|v|²` and
/// `eta_lower|v|² ≤ vᵀHη(u)v ≤ eta_upper|v|²` on `region`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HessianBounds {
    pub c_flux: f64,
    pub eta_lower: f64,
    pub eta_upper: f64,
    pub region: CompactBox,
    pub method: BoundMethod,
    pub safety: f64,
}

/// Total state samples for the sampled bounds (100² for m = 2).
const STATE_SAMPLES: usize = 10_000;
const DIRECTIONS: usize = 64;

pub fn compute_hessian_bounds<M: ConservationLaw + ?Sized>(
    model: &M,
    region: &CompactBox,
    safety: f64,
) -> Result<HessianBounds, ModelError> {
    compute_hessian_bounds_with(model, region, safety, STATE_SAMPLES, DIRECTIONS)
}

/// Sampled bounds with explicit resolution; `analytic` forms are used when
/// the model supplies them.
pub fn compute_hessian_bounds_with<M: ConservationLaw + ?Sized>(
    model: &M,
    region: &CompactBox,
    safety: f64,
    state_samples: usize,
    directions: usize,
) -> Result<HessianBounds, ModelError> {
    let m = model.system_size();
    if region.dim() != m {
        return Err(ModelError::WrongSize {
            expected: m,
            got: region.dim(),
        });
    }
    if !(safety >= 1.0) {
        return Err(ModelError::InvalidBox(format!("safety factor {safety} < 1")));
    }
    if !box_admissible(model, region) {
        return Err(ModelError::InvalidBox(
            "box leaves the admissible state space".into(),
        ));
    }
    if let Some((c_flux, eta_lower, eta_upper)) = model.analytic_hessian_bounds(region) {
        return Ok(HessianBounds {
            c_flux,
            eta_lower,
            eta_upper,
            region: region.clone(),
            method: BoundMethod::Analytic,
            safety: 1.0,
        });
    }

    let per_axis = (state_samples as f64).powf(1.0 / m as f64).round().max(2.0) as usize;
    let dirs = unit_directions(m, directions);
    let mut hf = vec![0.0; m * m * m];
    let mut he = vec![0.0; m * m];
    let (mut c_flux, mut lo, mut hi) = (0.0f64, f64::INFINITY, 0.0f64);
    for u in region.grid(per_axis) {
        model.flux_hessian(&u, &mut hf);
        model.entropy_hessian(&u, &mut he);
        for v in &dirs {
            let mut norm2 = 0.0;
            for k in 0..m {
                let q = quad_form(&hf[k * m * m..(k + 1) * m * m], v);
                norm2 += q * q;
            }
            c_flux = c_flux.max(norm2.sqrt());
        }
        let eig = nalgebra::DMatrix::from_row_slice(m, m, &he).symmetric_eigenvalues();
        lo = lo.min(eig.min());
        hi = hi.max(eig.max());
        if lo <= 0.0 {
            return Err(ModelError::NotConvex { state: u });
        }
    }
    Ok(HessianBounds {
        c_flux: c_flux * safety,
        eta_lower: lo / safety,
        eta_upper: hi * safety,
        region: region.clone(),
        method: BoundMethod::Sampled,
        safety,
    })
}

fn quad_form(a: &[f64], v: &[f64]) -> f64 {
    let m = v.len();
    let mut s = 0.0;
    for i in 0..m {
        for j in 0..m {
            s += v[i] * a[i * m + j] * v[j];
        }
    }
    s
}

/// Unit vectors: ±1 for m = 1, `n` equispaced angles for m = 2, and a
/// deterministic quasi-uniform spiral in higher dimension.
fn unit_directions(m: usize, n: usize) -> Vec<Vec<f64>> {
    match m {
        1 => vec![vec![1.0]],
        2 => (0..n)
            .map(|i| {
                let a = std::f64::consts::TAU * i as f64 / n as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            // Halton points on the cube, normalised
            (0..n.max(2 * m))
                .map(|i| {
                    let mut v: Vec<f64> = (0..m)
                        .map(|k| {
                            let base = [2u64, 3, 5, 7, 11, 13, 17, 19][k % 8];
                            2.0 * radical_inverse(i as u64 + 1, base) - 1.0
                        })
                        .collect();
                    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                    v.iter_mut().for_each(|x| *x /= n);
                    v
                })
                .collect()
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut r = 0.0;
    while i > 0 {
        r += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    r
}

#[cfg(test)]
pub(crate) mod testing {
    use super::*;

    /// F(u) = u³/3 with η = u²/2, q = u⁴/4.
    pub struct Cubic;

    impl ConservationLaw for Cubic {
        fn system_size(&self) -> usize {
            1
        }
        fn name(&self) -> &str {
            "cubic"
        }
        fn check_admissible(&self, _u: &[f64]) -> Result<(), ModelError> {
            Ok(())
        }
        fn flux(&self, u: &[f64], out: &mut [f64]) {
            out[0] = u[0].powi(3) / 3.0;
        }
        fn flux_jacobian(&self, u: &[f64], out: &mut [f64]) {
            out[0] = u[0] * u[0];
        }
        fn flux_hessian(&self, u: &[f64], out: &mut [f64]) {
            out[0] = 2.0 * u[0];
        }
        fn entropy(&self, u: &[f64]) -> f64 {
            0.5 * u[0] * u[0]
        }
        fn entropy_gradient(&self, u: &[f64], out: &mut [f64]) {
            out[0] = u[0];
        }
        fn entropy_hessian(&self, _u: &[f64], out: &mut [f64]) {
            out[0] = 1.0;
        }
        fn entropy_flux(&self, u: &[f64]) -> f64 {
            u[0].powi(4) / 4.0
        }
        fn max_wave_speed(&self, u: &[f64]) -> f64 {
            u[0] * u[0]
        }
        fn analytic_hessian_bounds(&self, b: &CompactBox) -> Option<(f64, f64, f64)> {
            Some((2.0 * b.lower[0].abs().max(b.upper[0].abs()), 1.0, 1.0))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::testing::Cubic;
    use super::*;

    const H: f64 = 1e-6;

    fn sample_states(model: &Model, n: usize) -> Vec<Vec<f64>> {
        // deterministic LCG so the test is reproducible without an RNG dep
        let mut s: u64 = 0x9E3779B97F4A7C15;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        (0..n)
            .map(|_| match model {
                Model::ShallowWater { .. } => vec![0.2 + 2.0 * next(), 4.0 * next() - 2.0],
                _ => vec![6.0 * next() - 3.0],
            })
            .collect()
    }

    fn models() -> [Model; 3] {
        [
            Model::Burgers,
            Model::LinearAdvection { velocity: -0.7 },
            Model::ShallowWater { gravity: 9.81 },
        ]
    }

    fn fd_jacobian(model: &Model, u: &[f64]) -> Vec<f64> {
        let m = u.len();
        let mut jac = vec![0.0; m * m];
        let (mut fp, mut fm) = (vec![0.0; m], vec![0.0; m]);
        for j in 0..m {
            let mut up = u.to_vec();
            let mut um = u.to_vec();
            up[j] += H;
            um[j] -= H;
            model.flux(&up, &mut fp);
            model.flux(&um, &mut fm);
            for i in 0..m {
                jac[i * m + j] = (fp[i] - fm[i]) / (2.0 * H);
            }
        }
        jac
    }

    #[test]
    fn flux_examples() {
        assert_eq!(flux_eval(&Model::Burgers, &vec![0.0].into()).unwrap(), vec![0.0]);
        assert_eq!(flux_eval(&Model::Burgers, &vec![2.0].into()).unwrap(), vec![2.0]);
        let sw = Model::ShallowWater { gravity: 1.0 };
        assert_eq!(flux_eval(&sw, &vec![1.0, 0.0].into()).unwrap(), vec![0.0, 0.5]);
    }

    #[test]
    fn inadmissible_height_is_rejected() {
        let sw = Model::ShallowWater { gravity: 1.0 };
        let err = flux_eval(&sw, &vec![-0.1, 0.0].into()).unwrap_err();
        assert!(matches!(err, ModelError::Inadmissible { constraint, .. } if constraint.contains("height")));
        assert!(matches!(
            flux_eval(&sw, &vec![1.0].into()),
            Err(ModelError::WrongSize { .. })
        ));
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        for model in models() {
            let m = model.system_size();
            let mut jac = vec![0.0; m * m];
            for u in sample_states(&model, 50) {
                model.flux_jacobian(&u, &mut jac);
                let fd = fd_jacobian(&model, &u);
                for (a, b) in jac.iter().zip(&fd) {
                    assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{model:?} {u:?}");
                }
            }
        }
    }

    #[test]
    fn entropy_compatibility() {
        for model in models() {
            let m = model.system_size();
            let (mut jac, mut grad) = (vec![0.0; m * m], vec![0.0; m]);
            for u in sample_states(&model, 100) {
                model.flux_jacobian(&u, &mut jac);
                model.entropy_gradient(&u, &mut grad);
                for j in 0..m {
                    let lhs: f64 = (0..m).map(|i| grad[i] * jac[i * m + j]).sum();
                    let mut up = u.clone();
                    let mut um = u.clone();
                    up[j] += H;
                    um[j] -= H;
                    let dq = (model.entropy_flux(&up) - model.entropy_flux(&um)) / (2.0 * H);
                    assert!((lhs - dq).abs() < 1e-5 * lhs.abs().max(1.0), "{model:?} {u:?}");
                }
            }
        }
    }

    #[test]
    fn hessians_match_finite_differences() {
        for model in models() {
            let m = model.system_size();
            let (mut hf, mut he) = (vec![0.0; m * m * m], vec![0.0; m * m]);
            let (mut gp, mut gm) = (vec![0.0; m], vec![0.0; m]);
            for u in sample_states(&model, 30) {
                model.flux_hessian(&u, &mut hf);
                model.entropy_hessian(&u, &mut he);
                for j in 0..m {
                    let mut up = u.clone();
                    let mut um = u.clone();
                    up[j] += H;
                    um[j] -= H;
                    let (mut jp, mut jm) = (vec![0.0; m * m], vec![0.0; m * m]);
                    model.flux_jacobian(&up, &mut jp);
                    model.flux_jacobian(&um, &mut jm);
                    model.entropy_gradient(&up, &mut gp);
                    model.entropy_gradient(&um, &mut gm);
                    for i in 0..m {
                        let fd = (gp[i] - gm[i]) / (2.0 * H);
                        assert!((he[i * m + j] - fd).abs() < 1e-5 * fd.abs().max(1.0));
                        for k in 0..m {
                            let fd = (jp[k * m + i] - jm[k * m + i]) / (2.0 * H);
                            let an = hf[k * m * m + i * m + j];
                            assert!((an - fd).abs() < 1e-4 * fd.abs().max(1.0), "{model:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn strict_hyperbolicity_and_convexity() {
        let sw = Model::ShallowWater { gravity: 2.0 };
        let mut jac = vec![0.0; 4];
        let mut he = vec![0.0; 4];
        for u in sample_states(&sw, 100) {
            sw.flux_jacobian(&u, &mut jac);
            let (tr, det) = (jac[0] + jac[3], jac[0] * jac[3] - jac[1] * jac[2]);
            assert!(tr * tr - 4.0 * det > 1e-12, "eigenvalues not distinct at {u:?}");
            sw.entropy_hessian(&u, &mut he);
            assert!(he[0] > 0.0 && he[0] * he[3] - he[1] * he[2] > 0.0);
            assert!((he[1] - he[2]).abs() < 1e-14);
        }
    }

    #[test]
    fn wave_speed_dominates_fd_spectral_radius() {
        for model in models() {
            for u in sample_states(&model, 100) {
                let jac = fd_jacobian(&model, &u);
                let rho = if u.len() == 1 {
                    jac[0].abs()
                } else {
                    let (tr, det) = (jac[0] + jac[3], jac[0] * jac[3] - jac[1] * jac[2]);
                    let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
                    (tr / 2.0 + disc).abs().max((tr / 2.0 - disc).abs())
                };
                assert!(model.max_wave_speed(&u) >= rho - 1e-5, "{model:?} {u:?}");
            }
        }
    }

    #[test]
    fn analytic_bounds() {
        let b = CompactBox::new(vec![-3.0], vec![5.0]).unwrap();
        let hb = compute_hessian_bounds(&Model::Burgers, &b, 1.1).unwrap();
        assert_eq!((hb.c_flux, hb.eta_lower, hb.eta_upper), (1.0, 1.0, 1.0));
        assert_eq!(hb.method, BoundMethod::Analytic);

        let b = CompactBox::new(vec![-1.0], vec![2.0]).unwrap();
        let hb = compute_hessian_bounds(&Cubic, &b, 1.1).unwrap();
        assert_eq!(hb.c_flux, 4.0);
    }

    /// Independent dense-grid oracle: exact eigenvalues of the 2×2 Hessians on
    /// a fine grid.
    fn shallow_water_oracle(g: f64, b: &CompactBox, n: usize) -> (f64, f64, f64) {
        let sw = ShallowWater { gravity: g };
        let (mut cf, mut lo, mut hi) = (0.0f64, f64::INFINITY, 0.0f64);
        let mut hf = [0.0; 8];
        let mut he = [0.0; 4];
        for u in b.grid(n) {
            sw.flux_hessian(&u, &mut hf);
            sw.entropy_hessian(&u, &mut he);
            let eig = |a: &[f64]| {
                let (tr, det) = (a[0] + a[3], a[0] * a[3] - a[1] * a[2]);
                let d = (tr * tr / 4.0 - det).max(0.0).sqrt();
                (tr / 2.0 - d, tr / 2.0 + d)
            };
            // only the momentum component is curved
            let (a, c) = eig(&hf[4..8]);
            cf = cf.max(a.abs().max(c.abs()));
            let (a, c) = eig(&he);
            lo = lo.min(a);
            hi = hi.max(c);
        }
        (cf, lo, hi)
    }

    #[test]
    fn sampled_shallow_water_bounds_cross_checked() {
        let b = CompactBox::new(vec![0.5, -1.0], vec![2.0, 1.0]).unwrap();
        let sw = Model::ShallowWater { gravity: 1.0 };
        let raw = compute_hessian_bounds(&sw, &b, 1.0).unwrap();
        let (cf, lo, hi) = shallow_water_oracle(1.0, &b, 400);
        assert_eq!(raw.method, BoundMethod::Sampled);
        assert!((raw.c_flux - cf).abs() < 0.01 * cf, "{} vs {cf}", raw.c_flux);
        assert!((raw.eta_lower - lo).abs() < 0.01 * lo);
        assert!((raw.eta_upper - hi).abs() < 0.01 * hi);

        let safe = compute_hessian_bounds(&sw, &b, 1.1).unwrap();
        assert!(safe.c_flux >= cf && safe.eta_lower <= lo && safe.eta_upper >= hi);

        // fresh random (u, v) pairs respect the safe bounds
        let mut s: u64 = 12345;
        let mut next = || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            (s >> 11) as f64 / (1u64 << 53) as f64
        };
        let (mut hf, mut he) = (vec![0.0; 8], vec![0.0; 4]);
        for _ in 0..1000 {
            let u = [0.5 + 1.5 * next(), -1.0 + 2.0 * next()];
            let a = std::f64::consts::TAU * next();
            let v = [a.cos(), a.sin()];
            sw.flux_hessian(&u, &mut hf);
            sw.entropy_hessian(&u, &mut he);
            let q = quad_form(&hf[4..], &v).abs();
            let e = quad_form(&he, &v);
            assert!(q <= safe.c_flux && safe.eta_lower <= e && e <= safe.eta_upper);
        }
    }

    #[test]
    fn bounds_reject_bad_boxes() {
        let sw = Model::ShallowWater { gravity: 1.0 };
        let b = CompactBox::new(vec![-0.5, -1.0], vec![2.0, 1.0]).unwrap();
        assert!(compute_hessian_bounds(&sw, &b, 1.1).is_err());
        assert!(CompactBox::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn compact_box_inflation_stays_admissible() {
        let sw = Model::ShallowWater { gravity: 1.0 };
        let mut r = StateRange::empty(2);
        r.include(&[0.05, -1.0]);
        r.include(&[2.0, 1.0]);
        let b = build_compact_box(&sw, &r).unwrap();
        assert!(b.lower[0] > 0.0 && b.lower[0] <= 0.05);
        assert!(b.upper[1] > 1.0);

        let mut r = StateRange::empty(1);
        r.include(&[1.0]);
        r.include(&[3.0]);
        let b = build_compact_box(&Model::Burgers, &r).unwrap();
        assert!((b.lower[0] - 0.8).abs() < 1e-15 && (b.upper[0] - 3.2).abs() < 1e-15);
    }
}
