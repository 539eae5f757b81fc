use super::{CompactBox, ConservationLaw};
use crate::error::ModelError;

/// Linear advection `F(u) = a u` with the quadratic entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearAdvection {
    pub velocity: f64,
}

impl ConservationLaw for LinearAdvection {
    fn system_size(&self) -> usize {
        1
    }
    fn name(&self) -> &str {
        "linear-advection"
    }
    fn check_admissible(&self, u: &[f64]) -> Result<(), ModelError> {
        if u[0].is_finite() {
            Ok(())
        } else {
            Err(ModelError::Inadmissible {
                constraint: "u must be finite",
                value: u[0],
            })
        }
    }
    fn flux(&self, u: &[f64], out: &mut [f64]) {
        out[0] = self.velocity * u[0];
    }
    fn flux_jacobian(&self, _u: &[f64], out: &mut [f64]) {
        out[0] = self.velocity;
    }
    fn flux_hessian(&self, _u: &[f64], out: &mut [f64]) {
        out[0] = 0.0;
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
        0.5 * self.velocity * u[0] * u[0]
    }
    fn max_wave_speed(&self, _u: &[f64]) -> f64 {
        self.velocity.abs()
    }
    fn analytic_hessian_bounds(&self, _bounds: &CompactBox) -> Option<(f64, f64, f64)> {
        Some((0.0, 1.0, 1.0))
    }
}
