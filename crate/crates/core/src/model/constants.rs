use serde::{Deserialize, Serialize};

use super::cubic::Cubic;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::roots::{bisect, bisect_predicate, ROOT_TOL};

/// Constants that depend on β only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaConstants {
    pub rho_hat: f64,
    pub gamma_tilde1: f64,
    pub gamma_star: f64,
    pub mu2_star: f64,
    pub mu3_star: f64,
    pub beta1: f64,
    pub beta_tilde2: f64,
    pub delta0: f64,
    pub beta0: f64,
    /// Smallest γ in (γ̃₁, γ*) passing the tangent-line test; `None` when
    /// no γ in that interval passes (β too small).
    pub gamma_tilde2: Option<f64>,
    pub c_lower: f64,
    pub b0: f64,
}

/// Truncation constants for a cubic with a stable upper equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    #[serde(rename = "M_gamma")]
    pub m_gamma: f64,
    pub theta1: f64,
    pub theta2: f64,
    #[serde(rename = "M1")]
    pub m1: f64,
    pub beta2: f64,
    /// Whether the tangent line at μ₃ dominates p on [-M1, β2].
    pub tangent_holds: bool,
}

/// Every closed-form constant at (β, γ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub mu2: f64,
    pub mu3: f64,
    pub rho_hat: f64,
    pub gamma_tilde1: f64,
    pub gamma_star: f64,
    pub mu2_star: f64,
    pub mu3_star: f64,
    pub beta1: f64,
    pub beta_tilde2: f64,
    pub delta0: f64,
    pub beta0: f64,
    pub gamma_tilde2: Option<f64>,
    #[serde(rename = "M_gamma")]
    pub m_gamma: f64,
    pub theta1: f64,
    pub theta2: f64,
    #[serde(rename = "M1")]
    pub m1: f64,
    pub beta2: f64,
    pub c_lower: f64,
    pub b0: f64,
}

/// `L_γ(μ, 0) = μ²/(2γ) + F(μ)`.
pub fn energy_level(mu: f64, params: &ModelParams) -> f64 {
    mu * mu / (2.0 * params.gamma) + Cubic::canonical(params.beta).potential(mu)
}

/// Smallest γ with three equilibria, 4/(1-β)².
pub fn n1_threshold(beta: f64) -> f64 {
    4.0 / ((1.0 - beta) * (1.0 - beta))
}

/// Nonzero equilibria μ₂ < μ₃ of f(u) = u/γ, by bisection on the brackets
/// (β, (1+β)/2) and ((1+β)/2, 1).
pub fn equilibria(beta: f64, gamma: f64) -> Result<(f64, f64)> {
    if gamma <= n1_threshold(beta) {
        return Err(Error::Regime(format!(
            "gamma = {gamma} <= 4/(1-beta)^2 = {}: only the trivial equilibrium",
            n1_threshold(beta)
        )));
    }
    let f = Cubic::canonical(beta);
    let g = |u: f64| f.eval(u) - u / gamma;
    let mid = 0.5 * (1.0 + beta);
    let mu2 = bisect(g, beta, mid, ROOT_TOL, "mu2")?;
    let mu3 = bisect(g, mid, 1.0, ROOT_TOL, "mu3")?;
    Ok((mu2, mu3))
}

/// Tangent-line test at μ₃: f(μ₃) - f'(μ₃)(M_γ + μ₃) > 1/γ.
pub fn t5_holds(beta: f64, gamma: f64) -> bool {
    let Ok((_, mu3)) = equilibria(beta, gamma) else {
        return false;
    };
    let f = Cubic::canonical(beta);
    let Ok(m) = level_below_zero(&f, 1.0 / gamma) else {
        return false;
    };
    f.eval(mu3) - f.deriv(mu3) * (m + mu3) > 1.0 / gamma
}

/// The positive M with p(-M) = level, for a cubic increasing on (-∞, 0].
pub fn level_below_zero(p: &Cubic, level: f64) -> Result<f64> {
    let g = |m: f64| p.eval(-m) - level;
    let mut hi = 1.0;
    let mut k = 0;
    while g(hi) < 0.0 {
        hi *= 2.0;
        k += 1;
        if k > 60 {
            return Err(Error::RootBracket { what: "M".into(), lo: 0.0, hi });
        }
    }
    bisect(g, 0.0, hi, ROOT_TOL, "M")
}

fn beta0_equation(b: f64) -> f64 {
    2.0 * b * (1.0 + b) / 3.0 - (1.0 - 2.0 * b).powi(2) * (2.0 - b) / 27.0
}

/// Root of 2β₀(1+β₀)/3 = (1-2β₀)²(2-β₀)/27 in (0, 1/2).
pub fn beta0() -> Result<f64> {
    bisect(beta0_equation, 0.0, 0.5, ROOT_TOL, "beta0")
}

/// γ̃₂: sample the predicate on 10³ points over (γ̃₁, γ*) and bisect to
/// 1e-8 between the first passing sample and its predecessor. When a
/// later sample fails again the predicate is not monotone and the first
/// passing sample is returned.
pub fn gamma_tilde2(beta: f64, gamma_tilde1: f64, gamma_star: f64) -> Option<f64> {
    let n = 1000;
    let samples: Vec<f64> = (1..n)
        .map(|k| gamma_tilde1 + (gamma_star - gamma_tilde1) * k as f64 / n as f64)
        .collect();
    let first = samples.iter().position(|&g| t5_holds(beta, g))?;
    let monotone = samples[first..].iter().all(|&g| t5_holds(beta, g));
    if !monotone {
        return Some(samples[first]);
    }
    let lo = if first == 0 { gamma_tilde1 } else { samples[first - 1] };
    Some(bisect_predicate(|g| t5_holds(beta, g), lo, samples[first], 1e-8))
}

/// Zero of the potential P in (lo, hi).
fn potential_zero(p: &Cubic, lo: f64, hi: f64, what: &str) -> Result<f64> {
    bisect(|x| p.potential(x), lo, hi, ROOT_TOL, what)
}

/// Zero of P beyond `top`, where P increases to +∞.
pub fn potential_zero_above(p: &Cubic, top: f64) -> Result<f64> {
    let mut hi = top + 1.0;
    let mut k = 0;
    while p.potential(hi) <= 0.0 {
        hi = top + 2.0 * (hi - top);
        k += 1;
        if k > 60 {
            return Err(Error::RootBracket { what: "potential zero".into(), lo: top, hi });
        }
    }
    potential_zero(p, top, hi, "potential zero above top")
}

/// Zero of P between the middle and top roots (the β₁ analogue).
pub fn potential_zero_between(p: &Cubic, mid: f64, top: f64) -> Result<f64> {
    potential_zero(p, mid, top, "potential zero between roots")
}

/// Truncation constants for a cubic `p` with roots 0 < mid < top, decreasing
/// at the equilibrium `mu3` of p(u) = u/γ, whose third tangent intersection
/// lies to the left.
pub fn truncation(p: &Cubic, gamma: f64, mu3: f64, mid: f64, top: f64, beta_tilde2: f64) -> Result<Truncation> {
    let m_gamma = level_below_zero(p, 1.0 / gamma)?;
    let tangent = |x: f64| p.eval(mu3) + p.deriv(mu3) * (x - mu3);
    let mut theta1 = 0.01f64.min(((beta_tilde2).min(top + mid / 2.0) - top) / 2.0);
    let mut last = None;
    for _ in 0..60 {
        let beta2 = top + theta1;
        let m1 = level_below_zero(p, beta2 / gamma)?;
        let n = 10_000;
        let ok = (0..=n).all(|k| {
            let x = -m1 + (beta2 + m1) * k as f64 / n as f64;
            let scale = 1.0 + p.eval(x).abs();
            tangent(x) - p.eval(x) >= -1e-14 * scale
        });
        let t = Truncation { m_gamma, theta1, theta2: m1 - m_gamma, m1, beta2, tangent_holds: ok };
        if ok {
            return Ok(t);
        }
        last = Some(t);
        theta1 *= 0.5;
    }
    Ok(last.expect("loop ran"))
}

/// β-only constants.
pub fn beta_constants(beta: f64) -> Result<BetaConstants> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::InvalidParams(format!("beta = {beta} violates 0 < beta < 1/2")));
    }
    let f = Cubic::canonical(beta);
    let rho_hat = (1.0 + beta + (beta * beta - beta + 1.0).sqrt()) / 3.0;
    let gamma_tilde1 = rho_hat / f.eval(rho_hat);
    let gamma_star = 9.0 / ((1.0 - 2.0 * beta) * (2.0 - beta));
    let mu3_star = 2.0 * (1.0 + beta) / 3.0;
    let beta1 = potential_zero_between(&f, beta, 1.0)?;
    let beta_tilde2 = potential_zero_above(&f, 1.0)?;
    Ok(BetaConstants {
        rho_hat,
        gamma_tilde1,
        gamma_star,
        mu2_star: mu3_star / 2.0,
        mu3_star,
        beta1,
        beta_tilde2,
        delta0: (1.0 - 2.0 * beta).powi(2) / 2.0,
        beta0: beta0()?,
        gamma_tilde2: gamma_tilde2(beta, gamma_tilde1, gamma_star),
        c_lower: (24.0 / (1.0 - 2.0 * beta)).sqrt(),
        b0: -2.0 * (beta / 2f64.sqrt()).ln(),
    })
}

/// All constants at (β, γ). Fails when γ ≤ 4/(1-β)².
pub fn derive_constants(params: &ModelParams) -> Result<DerivedConstants> {
    params.validate()?;
    let b = beta_constants(params.beta)?;
    derive_with(params, &b)
}

pub(crate) fn derive_with(params: &ModelParams, b: &BetaConstants) -> Result<DerivedConstants> {
    let (mu2, mu3) = equilibria(params.beta, params.gamma)?;
    let f = Cubic::canonical(params.beta);
    let t = truncation(&f, params.gamma, mu3, params.beta, 1.0, b.beta_tilde2)?;
    Ok(DerivedConstants {
        mu2,
        mu3,
        rho_hat: b.rho_hat,
        gamma_tilde1: b.gamma_tilde1,
        gamma_star: b.gamma_star,
        mu2_star: b.mu2_star,
        mu3_star: b.mu3_star,
        beta1: b.beta1,
        beta_tilde2: b.beta_tilde2,
        delta0: b.delta0,
        beta0: b.beta0,
        gamma_tilde2: b.gamma_tilde2,
        m_gamma: t.m_gamma,
        theta1: t.theta1,
        theta2: t.theta2,
        m1: t.m1,
        beta2: t.beta2,
        c_lower: b.c_lower,
        b0: b.b0,
    })
}
