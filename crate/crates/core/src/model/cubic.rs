use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::roots::{bisect, ROOT_TOL};

/// A cubic `p(u) = a3 u³ + a2 u² + a1 u + a0` together with its potential
/// `P(ξ) = -∫₀^ξ p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cubic {
    pub a3: f64,
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl Cubic {
    pub fn new(a3: f64, a2: f64, a1: f64, a0: f64) -> Self {
        Self { a3, a2, a1, a0 }
    }

    /// `f(u) = u(u-β)(1-u)`.
    pub fn canonical(beta: f64) -> Self {
        Self { a3: -1.0, a2: 1.0 + beta, a1: -beta, a0: 0.0 }
    }

    pub fn eval(&self, u: f64) -> f64 {
        ((self.a3 * u + self.a2) * u + self.a1) * u + self.a0
    }

    pub fn deriv(&self, u: f64) -> f64 {
        (3.0 * self.a3 * u + 2.0 * self.a2) * u + self.a1
    }

    pub fn deriv2(&self, u: f64) -> f64 {
        6.0 * self.a3 * u + 2.0 * self.a2
    }

    pub fn potential(&self, xi: f64) -> f64 {
        -xi * (((self.a3 / 4.0 * xi + self.a2 / 3.0) * xi + self.a1 / 2.0) * xi + self.a0)
    }

    /// `p(u) - s` as a cubic.
    pub fn shifted(&self, s: f64) -> Self {
        Self { a0: self.a0 - s, ..*self }
    }

    /// `p(u) - k u` as a cubic.
    pub fn minus_linear(&self, k: f64) -> Self {
        Self { a1: self.a1 - k, ..*self }
    }

    /// `U ↦ p(m) - p(m - U)`.
    pub fn reflected_about(&self, m: f64) -> Self {
        Self {
            a3: self.a3,
            a2: -(3.0 * self.a3 * m + self.a2),
            a1: self.deriv(m),
            a0: 0.0,
        }
    }

    /// Real roots, ascending, each to [`ROOT_TOL`]. Double roots at a
    /// critical point are reported once.
    pub fn real_roots(&self) -> Result<Vec<f64>> {
        if self.a3 == 0.0 {
            return Err(Error::InvalidParams("leading coefficient is zero".into()));
        }
        let p = |u: f64| self.eval(u);
        // Cauchy bound on root magnitude.
        let bound = 1.0
            + [self.a2, self.a1, self.a0]
                .iter()
                .map(|a| (a / self.a3).abs())
                .fold(0.0, f64::max);
        let disc = self.a2 * self.a2 - 3.0 * self.a3 * self.a1;
        let mut pts = vec![-bound];
        if disc > 0.0 {
            let sq = disc.sqrt();
            let mut c1 = (-self.a2 - sq) / (3.0 * self.a3);
            let mut c2 = (-self.a2 + sq) / (3.0 * self.a3);
            if c1 > c2 {
                std::mem::swap(&mut c1, &mut c2);
            }
            pts.push(c1);
            pts.push(c2);
        }
        pts.push(bound);
        let scale = self.a3.abs().max(self.a2.abs()).max(self.a1.abs()).max(self.a0.abs());
        let mut roots: Vec<f64> = Vec::new();
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (pa, pb) = (p(a), p(b));
            if pa.signum() != pb.signum() && pa != 0.0 && pb != 0.0 {
                roots.push(bisect(p, a, b, ROOT_TOL, "cubic root")?);
            }
        }
        // Tangential roots at critical points.
        for &x in &pts[1..pts.len() - 1] {
            if p(x).abs() <= 1e-13 * scale && !roots.iter().any(|r| (r - x).abs() < 1e-7) {
                roots.push(x);
            }
        }
        for &x in &pts {
            if p(x) == 0.0 && !roots.iter().any(|r| (r - x).abs() < 1e-12) {
                roots.push(x);
            }
        }
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(roots)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_terms_match_factored_form() {
        let beta = 0.37;
        let f = Cubic::canonical(beta);
        for k in 0..50 {
            let u = -1.0 + 0.05 * k as f64;
            let fac = u * (u - beta) * (1.0 - u);
            assert!((f.eval(u) - fac).abs() < 1e-14);
            let pot = u.powi(4) / 4.0 - (1.0 + beta) * u.powi(3) / 3.0 + beta * u * u / 2.0;
            assert!((f.potential(u) - pot).abs() < 1e-14);
        }
    }

    #[test]
    fn potential_is_negative_antiderivative() {
        let f = Cubic::new(-1.3, 0.4, 2.0, -0.5);
        let h = 1e-6;
        for k in 0..20 {
            let u = -1.0 + 0.1 * k as f64;
            let d = (f.potential(u + h) - f.potential(u - h)) / (2.0 * h);
            assert!((d + f.eval(u)).abs() < 1e-8);
        }
        assert_eq!(f.potential(0.0), 0.0);
    }

    #[test]
    fn roots_of_canonical() {
        let r = Cubic::canonical(0.45).real_roots().unwrap();
        assert_eq!(r.len(), 3);
        assert!(r[0].abs() < 1e-13 && (r[1] - 0.45).abs() < 1e-13 && (r[2] - 1.0).abs() < 1e-13);
    }

    #[test]
    fn single_real_root() {
        let r = Cubic::new(1.0, 0.0, 1.0, -2.0).real_roots().unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reflection_roundtrip() {
        let f = Cubic::canonical(0.45);
        let m = 0.9;
        let g = f.reflected_about(m);
        for k in 0..10 {
            let u = 0.1 * k as f64;
            assert!((g.eval(u) - (f.eval(m) - f.eval(m - u))).abs() < 1e-14);
        }
        let back = g.reflected_about(m);
        assert!((back.a3 - f.a3).abs() < 1e-14);
        assert!((back.a2 - f.a2).abs() < 1e-14);
        assert!((back.a1 - f.a1).abs() < 1e-14);
    }
}
