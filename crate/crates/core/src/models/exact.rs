//! Reference solutions used to validate the error bound.

use super::profile::{InitialProfile, SineComponent};
use super::StateVector;
use crate::error::OracleError;

/// First time a characteristic crossing occurs for Burgers with the data
/// `component` at parameter `y`: `1 / max(-∂_x u⁰)`.
pub fn burgers_shock_time(component: &SineComponent, y: f64) -> f64 {
    let slope = component.amplitude_at(y).abs() * component.wavenumber.abs();
    if slope == 0.0 {
        f64::INFINITY
    } else {
        1.0 / slope
    }
}

const NEWTON_TOL: f64 = 1e-12;

/// Classical Burgers solution by the method of characteristics: solves
/// `x = x₀ + t u⁰(x₀, y)` for the foot `x₀` with bracketed Newton.
pub fn exact_solution_smooth_burgers(
    profile: &InitialProfile,
    t: f64,
    x: f64,
    y: f64,
) -> Result<StateVector, OracleError> {
    let c = &profile.components[0];
    let shock_time = burgers_shock_time(c, y);
    if t >= shock_time {
        return Err(OracleError::PastShock { t, shock_time });
    }
    if t == 0.0 {
        return Ok(StateVector(vec![c.value(x, y)]));
    }
    let spread = c.amplitude_at(y).abs();
    let mid = c.offset_at(y);
    let g = |s: f64| s + t * c.value(s, y) - x;
    // g is increasing before the shock; its root lies in this bracket
    let (mut lo, mut hi) = (x - t * (mid + spread), x - t * (mid - spread));
    let mut s = x - t * c.value(x, y);
    s = s.clamp(lo, hi);
    for _ in 0..200 {
        let r = g(s);
        if r.abs() <= NEWTON_TOL {
            return Ok(StateVector(vec![c.value(s, y)]));
        }
        if r > 0.0 {
            hi = s;
        } else {
            lo = s;
        }
        let dg = 1.0 + t * c.derivative(s, y);
        let newton = s - r / dg;
        s = if dg > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if hi - lo <= f64::EPSILON * x.abs().max(1.0) {
            let r = g(s);
            if r.abs() <= NEWTON_TOL {
                return Ok(StateVector(vec![c.value(s, y)]));
            }
            return Err(OracleError::NoConvergence { x, residual: r });
        }
    }
    Err(OracleError::NoConvergence { x, residual: g(s) })
}

/// `u⁰(x - a t, y)`.
pub fn exact_solution_linear_advection(
    profile: &InitialProfile,
    velocity: f64,
    t: f64,
    x: f64,
    y: f64,
) -> StateVector {
    StateVector(profile.eval(x - velocity * t, y))
}
