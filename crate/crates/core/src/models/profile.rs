//! Parametrised initial data `u⁰(x, y)`.

use serde::{Deserialize, Serialize};

/// One component `(c + c_y y) + (A + A_y y) sin(k x + φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SineComponent {
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub offset_y: f64,
    #[serde(default)]
    pub amplitude: f64,
    #[serde(default)]
    pub amplitude_y: f64,
    #[serde(default = "one")]
    pub wavenumber: f64,
    #[serde(default)]
    pub phase: f64,
}

fn one() -> f64 {
    1.0
}

impl SineComponent {
    pub fn constant(c: f64) -> Self {
        SineComponent {
            offset: c,
            offset_y: 0.0,
            amplitude: 0.0,
            amplitude_y: 0.0,
            wavenumber: 1.0,
            phase: 0.0,
        }
    }

    pub fn amplitude_at(&self, y: f64) -> f64 {
        self.amplitude + self.amplitude_y * y
    }

    pub fn offset_at(&self, y: f64) -> f64 {
        self.offset + self.offset_y * y
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.offset_at(y) + self.amplitude_at(y) * (self.wavenumber * x + self.phase).sin()
    }

    pub fn derivative(&self, x: f64, y: f64) -> f64 {
        self.amplitude_at(y) * self.wavenumber * (self.wavenumber * x + self.phase).cos()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialProfile {
    pub components: Vec<SineComponent>,
}

impl InitialProfile {
    pub fn scalar(c: SineComponent) -> Self {
        InitialProfile {
            components: vec![c],
        }
    }

    pub fn system_size(&self) -> usize {
        self.components.len()
    }

    pub fn eval_into(&self, x: f64, y: f64, out: &mut [f64]) {
        for (o, c) in out.iter_mut().zip(&self.components) {
            *o = c.value(x, y);
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> Vec<f64> {
        self.components.iter().map(|c| c.value(x, y)).collect()
    }

    /// True when the data does not depend on the random parameter.
    pub fn is_deterministic(&self) -> bool {
        self.components
            .iter()
            .all(|c| c.offset_y == 0.0 && c.amplitude_y == 0.0)
    }
}
