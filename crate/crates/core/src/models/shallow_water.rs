use super::ConservationLaw;
use crate::error::ModelError;

/// Shallow water in conserved variables `(h, hu)` with the total energy
/// `η = ½ (hu)²/h + ½ g h²` as entropy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShallowWater {
    pub gravity: f64,
}

impl ConservationLaw for ShallowWater {
    fn system_size(&self) -> usize {
        2
    }
    fn name(&self) -> &str {
        "shallow-water"
    }
    fn check_admissible(&self, u: &[f64]) -> Result<(), ModelError> {
        if !(u[0] > 0.0) || !u[0].is_finite() {
            return Err(ModelError::Inadmissible {
                constraint: "water height must be positive",
                value: u[0],
            });
        }
        if !u[1].is_finite() {
            return Err(ModelError::Inadmissible {
                constraint: "discharge must be finite",
                value: u[1],
            });
        }
        Ok(())
    }
    fn flux(&self, u: &[f64], out: &mut [f64]) {
        let (h, q) = (u[0], u[1]);
        out[0] = q;
        out[1] = q * q / h + 0.5 * self.gravity * h * h;
    }
    fn flux_jacobian(&self, u: &[f64], out: &mut [f64]) {
        let v = u[1] / u[0];
        out[0] = 0.0;
        out[1] = 1.0;
        out[2] = self.gravity * u[0] - v * v;
        out[3] = 2.0 * v;
    }
    fn flux_hessian(&self, u: &[f64], out: &mut [f64]) {
        let (h, q) = (u[0], u[1]);
        out[..4].fill(0.0);
        out[4] = 2.0 * q * q / (h * h * h) + self.gravity;
        out[5] = -2.0 * q / (h * h);
        out[6] = out[5];
        out[7] = 2.0 / h;
    }
    fn entropy(&self, u: &[f64]) -> f64 {
        0.5 * u[1] * u[1] / u[0] + 0.5 * self.gravity * u[0] * u[0]
    }
    fn entropy_gradient(&self, u: &[f64], out: &mut [f64]) {
        let v = u[1] / u[0];
        out[0] = -0.5 * v * v + self.gravity * u[0];
        out[1] = v;
    }
    fn entropy_hessian(&self, u: &[f64], out: &mut [f64]) {
        let (h, q) = (u[0], u[1]);
        out[0] = q * q / (h * h * h) + self.gravity;
        out[1] = -q / (h * h);
        out[2] = out[1];
        out[3] = 1.0 / h;
    }
    fn entropy_flux(&self, u: &[f64]) -> f64 {
        let (h, q) = (u[0], u[1]);
        let v = q / h;
        v * (0.5 * q * v + self.gravity * h * h)
    }
    fn max_wave_speed(&self, u: &[f64]) -> f64 {
        (u[1] / u[0]).abs() + (self.gravity * u[0]).sqrt()
    }
}
