use serde::{Deserialize, Serialize};

use super::constants::{equilibria, potential_zero_above, potential_zero_between, truncation, Truncation};
use super::cubic::Cubic;
use super::params::ModelParams;
use super::spectral::{spectral_for_slope, Equilibrium, SpectralData};
use crate::error::{Error, Result};

/// `U ↦ f(μ₃) - f(μ₃ - U)`: the nonlinearity seen from the upper equilibrium.
pub fn reversed_transform(params: &ModelParams) -> Result<Cubic> {
    let (_, mu3) = equilibria(params.beta, params.gamma)?;
    Ok(Cubic::canonical(params.beta).reflected_about(mu3))
}

/// The wave system `dc²u'' + dc²u' + p(u) - v = 0`, `c²v'' + c²v' + u - γv = 0`
/// for a bistable cubic p with p(0) = 0 and roots 0 < mid < top.
///
/// Every solver stage reads its nonlinearity and constants from here, so
/// the canonical and the reflected problems share one code path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaveSystem {
    pub cubic: Cubic,
    pub gamma: f64,
    pub d: f64,
    pub mid: f64,
    pub top: f64,
    pub mu2: f64,
    pub mu3: f64,
    /// Zero of the potential in (mid, top); the phase level u(0).
    pub phase_level: f64,
    pub beta_tilde2: f64,
    pub delta0: f64,
    pub c_lower: f64,
    pub truncation: Truncation,
}

impl WaveSystem {
    pub fn canonical(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        Self::from_cubic(Cubic::canonical(params.beta), params.gamma, params.d)
    }

    pub fn reversed(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        Self::from_cubic(reversed_transform(params)?, params.gamma, params.d)
    }

    pub fn from_cubic(cubic: Cubic, gamma: f64, d: f64) -> Result<Self> {
        if !(cubic.a3 < 0.0) {
            return Err(Error::InvalidParams("cubic must have negative leading coefficient".into()));
        }
        if cubic.eval(0.0).abs() > 1e-14 {
            return Err(Error::InvalidParams("cubic must vanish at 0".into()));
        }
        let roots = cubic.real_roots()?;
        let pos: Vec<f64> = roots.iter().copied().filter(|r| *r > 1e-9).collect();
        if roots.len() != 3 || pos.len() != 2 {
            return Err(Error::Regime(format!("cubic roots {roots:?} are not 0 < mid < top")));
        }
        let (mid, top) = (pos[0], pos[1]);
        if !(cubic.potential(top) < 0.0) {
            return Err(Error::Regime("upper root is not the lower potential well".into()));
        }
        let eq = cubic.minus_linear(1.0 / gamma).real_roots()?;
        let eqp: Vec<f64> = eq.iter().copied().filter(|r| *r > 1e-9).collect();
        if eqp.len() != 2 {
            return Err(Error::Regime(format!("p(u) = u/gamma has nonzero roots {eqp:?}, need two")));
        }
        let (mu2, mu3) = (eqp[0], eqp[1]);
        let phase_level = potential_zero_between(&cubic, mid, top)?;
        let beta_tilde2 = potential_zero_above(&cubic, top)?;
        let trunc = truncation(&cubic, gamma, mu3, mid, top, beta_tilde2)?;
        let k = -cubic.a3;
        let beta_eff = mid / top;
        Ok(Self {
            cubic,
            gamma,
            d,
            mid,
            top,
            mu2,
            mu3,
            phase_level,
            beta_tilde2,
            delta0: k * (top - 2.0 * mid).powi(2) / 2.0,
            c_lower: (24.0 / (1.0 - 2.0 * beta_eff)).sqrt(),
            truncation: trunc,
        })
    }

    pub fn with_d(&self, d: f64) -> Self {
        Self { d, ..*self }
    }

    /// β analogue: -p'(0).
    pub fn slope_origin(&self) -> f64 {
        -self.cubic.deriv(0.0)
    }

    pub fn slope_mu3(&self) -> f64 {
        -self.cubic.deriv(self.mu3)
    }

    pub fn spectral(&self, c: f64, equilibrium: Equilibrium) -> Result<SpectralData> {
        let slope = match equilibrium {
            Equilibrium::Origin => self.slope_origin(),
            Equilibrium::Mu3 => self.slope_mu3(),
        };
        spectral_for_slope(equilibrium, slope, self.gamma, self.d, c)
    }

    /// √(δ₀/d), the speed bound.
    pub fn speed_bound(&self) -> f64 {
        (self.delta0 / self.d).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::constants::derive_constants;

    #[test]
    fn canonical_matches_closed_forms() {
        let p = ModelParams::new(0.45, 50.0, 1e-5).unwrap();
        let s = WaveSystem::canonical(&p).unwrap();
        let c = derive_constants(&p).unwrap();
        assert!((s.mu3 - c.mu3).abs() < 1e-12 && (s.mu2 - c.mu2).abs() < 1e-12);
        assert!((s.phase_level - c.beta1).abs() < 1e-12);
        assert!((s.delta0 - c.delta0).abs() < 1e-14);
        assert!((s.c_lower - c.c_lower).abs() < 1e-9);
        assert!((s.truncation.m1 - c.m1).abs() < 1e-12);
        assert!((s.truncation.beta2 - c.beta2).abs() < 1e-12);
        assert!((s.mid - 0.45).abs() < 1e-12 && (s.top - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reversed_equilibria() {
        let p = ModelParams::new(0.45, 50.0, 1e-5).unwrap();
        let ft = reversed_transform(&p).unwrap();
        let c = derive_constants(&p).unwrap();
        assert_eq!(ft.eval(0.0), 0.0);
        assert!((ft.eval(c.mu3) - c.mu3 / 50.0).abs() < 1e-14);
        let r = ft.minus_linear(1.0 / 50.0).real_roots().unwrap();
        assert_eq!(r.len(), 3);
        assert!(r[0].abs() < 1e-10);
        assert!((r[1] - 0.471698).abs() < 2e-6);
        assert!((r[1] - (c.mu3 - c.mu2)).abs() < 1e-10);
        assert!((r[2] - c.mu3).abs() < 1e-10);
        let s = WaveSystem::reversed(&p).unwrap();
        // slopes swap between the two equilibria
        assert!((s.slope_origin() + Cubic::canonical(0.45).deriv(c.mu3)).abs() < 1e-12);
        assert!((s.slope_mu3() - 0.45).abs() < 1e-10);
        assert!((s.top - 0.999).abs() < 2e-3);
        assert!((s.mid - 0.434).abs() < 2e-3);
    }

    #[test]
    fn reversed_is_involution() {
        let p = ModelParams::new(0.45, 50.0, 1e-5).unwrap();
        let s = WaveSystem::reversed(&p).unwrap();
        let back = s.cubic.reflected_about(s.mu3);
        let f = Cubic::canonical(0.45);
        assert!((back.a3 - f.a3).abs() < 1e-12);
        assert!((back.a2 - f.a2).abs() < 1e-12);
        assert!((back.a1 - f.a1).abs() < 1e-12);
        assert!(back.a0.abs() < 1e-12);
    }
}
