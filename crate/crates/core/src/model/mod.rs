//! Closed-form parameter analysis of the cubic, its equilibria and the
//! linearized wave system.

mod constants;
mod cubic;
mod params;
mod regime;
mod spectral;
mod system;

pub use constants::{
    beta0, beta_constants, derive_constants, energy_level, equilibria, gamma_tilde2, level_below_zero,
    n1_threshold, potential_zero_above, potential_zero_between, t5_holds, truncation, BetaConstants,
    DerivedConstants, Truncation,
};
pub use cubic::Cubic;
pub use params::ModelParams;
pub use regime::{classify_regime, hypothesis, EnergyOrder, Regime, RegimeReport, WaveKind};
pub use spectral::{eigenvalues, exponent_pair, spectral_for_slope, Equilibrium, SpectralData};
pub use system::{reversed_transform, WaveSystem};

/// Spectral data of the canonical system at an equilibrium.
pub fn spectral_data(params: &ModelParams, c: f64, equilibrium: Equilibrium) -> crate::Result<SpectralData> {
    let slope = match equilibrium {
        Equilibrium::Origin => params.beta,
        Equilibrium::Mu3 => {
            let (_, mu3) = equilibria(params.beta, params.gamma)?;
            -Cubic::canonical(params.beta).deriv(mu3)
        }
    };
    spectral_for_slope(equilibrium, slope, params.gamma, params.d, c)
}
