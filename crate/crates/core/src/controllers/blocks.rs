//! PD and PI blocks in continuous form and as backward-Euler sampled steps.

use serde::{Deserialize, Serialize};

use crate::error::{require, ParamError};

/// Proportional plus filtered derivative, `p + d·s/(tau_d·s + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdGains {
    pub p: f64,
    pub d: f64,
    pub tau_d: f64,
}

impl PdGains {
    pub const DEFAULT_TAU_D: f64 = 0.01;

    pub fn new(p: f64, d: f64) -> Self {
        Self {
            p,
            d,
            tau_d: Self::DEFAULT_TAU_D,
        }
    }

    pub fn validate(&self, field: &str) -> Result<(), ParamError> {
        require(&format!("{field}.p"), self.p, true, "finite")?;
        require(&format!("{field}.d"), self.d, true, "finite")?;
        require(
            &format!("{field}.tau_d"),
            self.tau_d,
            self.d == 0.0 || self.tau_d > 0.0,
            "> 0 when the derivative gain is nonzero",
        )
    }

    /// Output for input `u` and filter state `x` (the low-passed input).
    pub fn output(&self, u: f64, x: f64) -> f64 {
        if self.d == 0.0 {
            self.p * u
        } else {
            self.p * u + self.d * (u - x) / self.tau_d
        }
    }

    pub fn filter_derivative(&self, u: f64, x: f64) -> f64 {
        if self.d == 0.0 {
            0.0
        } else {
            (u - x) / self.tau_d
        }
    }

    /// Backward-Euler update of the filter state over `dt`, returning the new output.
    pub fn step(&self, x: &mut f64, u: f64, dt: f64) -> f64 {
        if self.d != 0.0 {
            let a = dt / self.tau_d;
            *x = (*x + a * u) / (1.0 + a);
        }
        self.output(u, *x)
    }
}

/// Proportional plus integral, output `kp·e + z` with `z' = ki·e`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiGains {
    pub kp: f64,
    pub ki: f64,
}

impl PiGains {
    pub fn validate(&self, field: &str) -> Result<(), ParamError> {
        require(&format!("{field}.kp"), self.kp, true, "finite")?;
        require(&format!("{field}.ki"), self.ki, self.ki >= 0.0, ">= 0")
    }

    pub fn output(&self, e: f64, z: f64) -> f64 {
        self.kp * e + z
    }

    pub fn integral_derivative(&self, e: f64) -> f64 {
        self.ki * e
    }

    /// Backward-Euler update of the integrator over `dt`, returning the new output.
    pub fn step(&self, z: &mut f64, e: f64, dt: f64) -> f64 {
        *z += dt * self.ki * e;
        self.output(e, *z)
    }
}
