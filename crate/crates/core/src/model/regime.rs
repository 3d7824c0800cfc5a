use serde::{Deserialize, Serialize};

use super::constants::{beta_constants, derive_with, energy_level, n1_threshold, t5_holds, DerivedConstants};
use super::cubic::Cubic;
use super::params::ModelParams;
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Subcritical,
    Critical,
    Supercritical,
    Outside,
}

/// Ordering of the energy levels of the three constant states.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyOrder {
    /// L(μ₂) > L(μ₃) > L(0)
    Mu2Mu3Zero,
    /// L(μ₂) > L(0) > L(μ₃)
    Mu2ZeroMu3,
    /// L(μ₃) = L(0) up to roundoff
    Balanced,
    Other,
    Undefined,
}

/// Wave kinds that can be requested from the solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveKind {
    Front,
    ReversedFront,
    Pulse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub n1_holds: bool,
    pub n2_holds: bool,
    pub regime: Regime,
    pub h1_holds: bool,
    pub h2_holds: bool,
    pub truncation_holds: bool,
    /// (L(μ₂,0), L(0,0), L(μ₃,0)); absent without three equilibria.
    pub energy_levels: Option<(f64, f64, f64)>,
    pub energy_order: EnergyOrder,
    pub constants: Option<DerivedConstants>,
}

impl RegimeReport {
    /// Whether the closed-form hypotheses cover the requested wave.
    pub fn admits(&self, kind: WaveKind) -> bool {
        let sub = self.regime == Regime::Subcritical;
        let sup = matches!(self.regime, Regime::Supercritical | Regime::Critical);
        match kind {
            WaveKind::Front => (sub && self.h1_holds) || (sup && self.h2_holds),
            WaveKind::ReversedFront => sub && self.h1_holds && self.h2_holds,
            WaveKind::Pulse => sub && self.h1_holds,
        }
    }
}

/// Real, well-separated linearization spectrum at an equilibrium with
/// -f' = slope: (slope - dγ)² - 4d > 0 and slope > dγ.
pub fn hypothesis(slope: f64, params: &ModelParams) -> bool {
    let dg = params.d * params.gamma;
    (slope - dg).powi(2) - 4.0 * params.d > 0.0 && slope > dg
}

pub fn classify_regime(params: &ModelParams) -> Result<RegimeReport> {
    params.validate()?;
    let b = beta_constants(params.beta)?;
    let gamma = params.gamma;
    let n1 = gamma > n1_threshold(params.beta);
    let n2 = gamma > b.gamma_tilde1;
    let h2 = hypothesis(params.beta, params);
    if !n1 {
        return Ok(RegimeReport {
            n1_holds: false,
            n2_holds: n2,
            regime: Regime::Outside,
            h1_holds: false,
            h2_holds: h2,
            truncation_holds: false,
            energy_levels: None,
            energy_order: EnergyOrder::Undefined,
            constants: None,
        });
    }
    let c = derive_with(params, &b)?;
    let f = Cubic::canonical(params.beta);
    let h1 = hypothesis(-f.deriv(c.mu3), params);
    let truncation = t5_holds(params.beta, gamma);
    let levels = (energy_level(c.mu2, params), 0.0, energy_level(c.mu3, params));
    let tol = 1e-12;
    let order = if (levels.2 - levels.1).abs() <= tol {
        EnergyOrder::Balanced
    } else if levels.0 > levels.2 && levels.2 > levels.1 {
        EnergyOrder::Mu2Mu3Zero
    } else if levels.0 > levels.1 && levels.1 > levels.2 {
        EnergyOrder::Mu2ZeroMu3
    } else {
        EnergyOrder::Other
    };
    let critical = (gamma - b.gamma_star).abs() <= 1e-9 * b.gamma_star;
    let regime = if critical {
        Regime::Critical
    } else if gamma > b.gamma_star {
        Regime::Supercritical
    } else if n2 && b.gamma_tilde2.is_some_and(|g2| gamma > g2) && params.beta > b.beta0 {
        Regime::Subcritical
    } else {
        Regime::Outside
    };
    Ok(RegimeReport {
        n1_holds: n1,
        n2_holds: n2,
        regime,
        h1_holds: h1,
        h2_holds: h2,
        truncation_holds: truncation,
        energy_levels: Some(levels),
        energy_order: order,
        constants: Some(c),
    })
}
