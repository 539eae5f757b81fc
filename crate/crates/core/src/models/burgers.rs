use super::{CompactBox, ConservationLaw};
use crate::error::ModelError;

/// Inviscid Burgers, `F(u) = u²/2` with `η = u²/2`, `q = u³/3`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Burgers;

impl ConservationLaw for Burgers {
    fn system_size(&self) -> usize {
        1
    }
    fn name(&self) -> &str {
        "burgers"
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
        out[0] = 0.5 * u[0] * u[0];
    }
    fn flux_jacobian(&self, u: &[f64], out: &mut [f64]) {
        out[0] = u[0];
    }
    fn flux_hessian(&self, _u: &[f64], out: &mut [f64]) {
        out[0] = 1.0;
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
        u[0] * u[0] * u[0] / 3.0
    }
    fn max_wave_speed(&self, u: &[f64]) -> f64 {
        u[0].abs()
    }
    fn analytic_hessian_bounds(&self, _bounds: &CompactBox) -> Option<(f64, f64, f64)> {
        Some((1.0, 1.0, 1.0))
    }
}
