use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters (β, γ, d) of the FitzHugh-Nagumo system
/// `u_t = u_xx + (f(u) - v)/d`, `v_t = v_xx + u - γ v`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub beta: f64,
    pub gamma: f64,
    pub d: f64,
}

impl ModelParams {
    pub fn new(beta: f64, gamma: f64, d: f64) -> Result<Self> {
        let p = Self { beta, gamma, d };
        p.validate()?;
        Ok(p)
    }

    /// Checks 0 < β < 1/2, γ > 0, d > 0.
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::InvalidParams(format!(
                "beta = {} violates 0 < beta < 1/2",
                self.beta
            )));
        }
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParams(format!("gamma = {} violates gamma > 0", self.gamma)));
        }
        if !(self.d.is_finite() && self.d > 0.0) {
            return Err(Error::InvalidParams(format!("d = {} violates d > 0", self.d)));
        }
        Ok(())
    }

    pub fn with_d(&self, d: f64) -> Self {
        Self { d, ..*self }
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self { gamma, ..*self }
    }
}
