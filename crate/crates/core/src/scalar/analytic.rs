//! The closed-form Nagumo front at the critical diffusion δ₀.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::beta_constants;

/// `H(x) = ½ - ½ tanh((x - a*)/(2(1-2β)))`, the decreasing heteroclinic of
/// `δ₀w'' + δ₀w' + f(w) = 0` from 1 to 0 with `H(0) = β₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticFront {
    pub beta: f64,
    pub a_star: f64,
    pub width: f64,
    pub delta0: f64,
}

impl AnalyticFront {
    pub fn value(&self, x: f64) -> f64 {
        0.5 - 0.5 * ((x - self.a_star) / self.width).tanh()
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let t = ((x - self.a_star) / self.width).tanh();
        -0.5 * (1.0 - t * t) / self.width
    }

    pub fn deriv2(&self, x: f64) -> f64 {
        let t = ((x - self.a_star) / self.width).tanh();
        t * (1.0 - t * t) / (self.width * self.width)
    }

    /// `δ₀H'' + δ₀H' + f(H)` evaluated from the closed forms.
    pub fn el_residual(&self, x: f64) -> f64 {
        let h = self.value(x);
        let f = h * (h - self.beta) * (1.0 - h);
        self.delta0 * (self.deriv2(x) + self.deriv(x)) + f
    }
}

/// The shift `a*` and the evaluator for the front at β.
pub fn analytic_front(beta: f64) -> Result<(f64, AnalyticFront)> {
    let b = beta_constants(beta)?;
    let width = 2.0 * (1.0 - 2.0 * beta);
    let a_star = -width * (1.0 - 2.0 * b.beta1).atanh();
    Ok((a_star, AnalyticFront { beta, a_star, width, delta0: b.delta0 }))
}
