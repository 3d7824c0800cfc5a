use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equilibrium {
    Origin,
    Mu3,
}

/// Linearization data at a stable equilibrium of the wave system.
///
/// The linear system is `c²W'' + c²W' = A W` with
/// `A = [[slope/d, 1/d], [-1, γ]]`. Eigenvector of λ₁ is `(η₂, -1)`,
/// of λ₂ is `(η₁, -1)`; left eigenvectors are `(1, ηᵢ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub equilibrium: Equilibrium,
    pub slope: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub s1: f64,
    pub s2: f64,
    pub s3: f64,
    pub s4: f64,
    pub r1: f64,
    pub r2: f64,
}

/// Roots of c²s² + c²s - q = 0 for q > 0, returned as (negative, positive)
/// without cancellation.
pub fn exponent_pair(q: f64, c: f64) -> (f64, f64) {
    let a = q / (c * c);
    let sq = (1.0 + 4.0 * a).sqrt();
    let pos = 2.0 * a / (1.0 + sq);
    (-1.0 - pos, pos)
}

/// Eigenvalues (λ₁, λ₂) of dλ² - (slope + dγ)λ + 1 + γ·slope = 0.
pub fn eigenvalues(slope: f64, gamma: f64, d: f64) -> Result<(f64, f64)> {
    let dg = d * gamma;
    let disc = (slope - dg).powi(2) - 4.0 * d;
    if !(slope > dg) {
        return Err(Error::Hypothesis(format!("slope {slope} > d*gamma = {dg} fails")));
    }
    if !(disc > 0.0) {
        return Err(Error::Hypothesis(format!("(slope - d*gamma)^2 - 4d = {disc} > 0 fails")));
    }
    let lambda2 = (slope + dg + disc.sqrt()) / (2.0 * d);
    let lambda1 = (1.0 + gamma * slope) / (d * lambda2);
    Ok((lambda1, lambda2))
}

/// Spectral data for an equilibrium with the given slope (β at the origin,
/// -f'(μ₃) at μ₃).
pub fn spectral_for_slope(equilibrium: Equilibrium, slope: f64, gamma: f64, d: f64, c: f64) -> Result<SpectralData> {
    if !(c > 0.0) {
        return Err(Error::InvalidParams(format!("speed c = {c} must be positive")));
    }
    let (lambda1, lambda2) = eigenvalues(slope, gamma, d)?;
    let eta1 = lambda2 - gamma;
    let eta2 = 1.0 / (d * eta1);
    let (s2, s3) = exponent_pair(lambda1, c);
    let (s1, s4) = exponent_pair(lambda2, c);
    let (r1, r2) = exponent_pair(gamma, c);
    Ok(SpectralData { equilibrium, slope, lambda1, lambda2, eta1, eta2, s1, s2, s3, s4, r1, r2 })
}

impl SpectralData {
    /// 2x2 matrix P with W' = P W on the span of the two modes with exponents
    /// `(slow, fast)` whose eigenvectors are `(η₂,-1)` and `(η₁,-1)`.
    pub fn subspace_matrix(&self, slow: f64, fast: f64) -> [[f64; 2]; 2] {
        // E = [[η₂, η₁], [-1, -1]], P = E diag(slow, fast) E⁻¹
        let (e2, e1) = (self.eta2, self.eta1);
        let det = -e2 + e1;
        let inv = [[-1.0 / det, -e1 / det], [1.0 / det, e2 / det]];
        let ed = [[e2 * slow, e1 * fast], [-slow, -fast]];
        let mut p = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                p[i][j] = ed[i][0] * inv[0][j] + ed[i][1] * inv[1][j];
            }
        }
        p
    }

    /// Modes decaying as z → +∞ (s₂ slow, s₁ fast).
    pub fn right_decay_matrix(&self) -> [[f64; 2]; 2] {
        self.subspace_matrix(self.s2, self.s1)
    }

    /// Modes decaying as z → -∞ (s₃ slow, s₄ fast).
    pub fn left_decay_matrix(&self) -> [[f64; 2]; 2] {
        self.subspace_matrix(self.s3, self.s4)
    }
}
