//! The weighted energy J_c(w) = ∫e^z {κ/2 w'² + ½ w 𝓛_c w + F(w)} and its
//! gradient in the discrete weighted metric ⟨a, b⟩ = Σ μ_i a_i b_i.

use serde::{Deserialize, Serialize};

use super::grid::WeightedGrid;
use super::nonlocal::NonlocalOperator;
use super::profile::Profile;
use crate::error::{Error, Result};
use crate::linalg::KahanSum;
use crate::model::Cubic;

/// The three terms of J and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JParts {
    pub gradient_term: f64,
    pub nonlocal_term: f64,
    pub f_integral: f64,
    pub total: f64,
}

/// N(w) = Σ e^{z_k + h/2} (w_{k+1} − w_k)² / h.
pub fn seminorm(grid: &WeightedGrid, u: &[f64]) -> f64 {
    let h = grid.h;
    let mut s = KahanSum::new();
    for k in 0..grid.n - 1 {
        let du = u[k + 1] - u[k];
        s.add((grid.z(k) + 0.5 * h).exp() * du * du / h);
    }
    s.value()
}

/// (‖w‖_{L²_ex}, N(w), ‖w‖_{H¹_ex}) with trapezoid weights for the L² part.
pub fn weighted_norms(w: &Profile) -> (f64, f64, f64) {
    let tw = w.grid.trapezoid_weights();
    let mut s = KahanSum::new();
    for (a, x) in tw.iter().zip(&w.values) {
        s.add(a * x * x);
    }
    let l2 = s.value();
    let n = seminorm(&w.grid, &w.values);
    (l2.sqrt(), n, (l2 + n).sqrt())
}

/// Energy functional at fixed (c, κ) for a cubic nonlinearity.
#[derive(Debug, Clone)]
pub struct Functional {
    pub op: NonlocalOperator,
    pub kappa: f64,
    pub cubic: Cubic,
}

/// Value, metric gradient and the nonlocal field at one point.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub parts: JParts,
    pub seminorm: f64,
    pub grad_j: Vec<f64>,
    pub grad_n: Vec<f64>,
    pub v: Vec<f64>,
}

impl Evaluation {
    /// 2J/N.
    pub fn normalized(&self) -> f64 {
        2.0 * self.parts.total / self.seminorm
    }

    /// Metric gradient of 2J/N.
    pub fn normalized_gradient(&self) -> Vec<f64> {
        let n = self.seminorm;
        let j = self.parts.total;
        self.grad_j
            .iter()
            .zip(&self.grad_n)
            .map(|(gj, gn)| 2.0 / n * (gj - j / n * gn))
            .collect()
    }
}

impl Functional {
    pub fn new(grid: WeightedGrid, c: f64, kappa: f64, gamma: f64, cubic: Cubic) -> Result<Self> {
        Ok(Self { op: NonlocalOperator::new(grid, c, gamma)?, kappa, cubic })
    }

    pub fn grid(&self) -> &WeightedGrid {
        &self.op.grid
    }

    /// Metric gradient of N: (∂N/∂u_i)/μ_i.
    pub fn seminorm_gradient(&self, u: &[f64]) -> Vec<f64> {
        let g = self.grid();
        let h = g.h;
        let (em, ep) = ((-0.5 * h).exp(), (0.5 * h).exp());
        let n = g.n;
        (0..n)
            .map(|i| {
                let mut d = 0.0;
                if i > 0 {
                    d += em * (u[i] - u[i - 1]);
                }
                if i + 1 < n {
                    d -= ep * (u[i + 1] - u[i]);
                }
                2.0 * d / (h * self.op.mass_scaled[i])
            })
            .collect()
    }

    pub fn parts_with(&self, u: &[f64], v: &[f64], n: f64) -> JParts {
        let g = self.grid();
        let mut nl = KahanSum::new();
        let mut fi = KahanSum::new();
        for i in 0..g.n {
            let mu = self.op.mass_scaled[i] * g.weight(i);
            nl.add(0.5 * mu * u[i] * v[i]);
            fi.add(mu * self.cubic.potential(u[i]));
        }
        let gradient_term = 0.5 * self.kappa * n;
        let nonlocal_term = nl.value();
        let f_integral = fi.value();
        JParts { gradient_term, nonlocal_term, f_integral, total: gradient_term + nonlocal_term + f_integral }
    }

    pub fn parts(&self, u: &[f64]) -> Result<JParts> {
        let v = self.op.apply(u)?;
        Ok(self.parts_with(u, &v, seminorm(self.grid(), u)))
    }

    pub fn evaluate(&self, u: &[f64]) -> Result<Evaluation> {
        let v = self.op.apply(u)?;
        let n = seminorm(self.grid(), u);
        let parts = self.parts_with(u, &v, n);
        let grad_n = self.seminorm_gradient(u);
        let grad_j = (0..u.len())
            .map(|i| 0.5 * self.kappa * grad_n[i] + v[i] - self.cubic.eval(u[i]))
            .collect();
        Ok(Evaluation { parts, seminorm: n, grad_j, grad_n, v })
    }

    /// 2J/N, failing for a (numerically) constant profile.
    pub fn normalized(&self, u: &[f64]) -> Result<f64> {
        let n = seminorm(self.grid(), u);
        if n < 1e-14 {
            return Err(Error::Degenerate(format!("N(u) = {n:e} < 1e-14")));
        }
        Ok(2.0 * self.parts(u)?.total / n)
    }
}

/// J_c(u).
pub fn evaluate_j(u: &Profile, c: f64, kappa: f64, gamma: f64, cubic: &Cubic) -> Result<JParts> {
    Functional::new(u.grid, c, kappa, gamma, *cubic)?.parts(&u.values)
}

/// Metric gradient of J_c at u.
pub fn gradient_j(u: &Profile, c: f64, kappa: f64, gamma: f64, cubic: &Cubic) -> Result<Profile> {
    let e = Functional::new(u.grid, c, kappa, gamma, *cubic)?.evaluate(&u.values)?;
    Profile::new(u.grid, e.grad_j)
}

/// 2J_c(u)/N(u).
pub fn normalized_j(u: &Profile, c: f64, kappa: f64, gamma: f64, cubic: &Cubic) -> Result<f64> {
    Functional::new(u.grid, c, kappa, gamma, *cubic)?.normalized(&u.values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smooth_random(rng: &mut ChaCha8Rng, g: &WeightedGrid) -> Vec<f64> {
        let a: Vec<f64> = (0..4).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let w: Vec<f64> = (0..4).map(|_| rng.gen_range(0.2..2.0)).collect();
        (0..g.n)
            .map(|i| {
                let z = g.z(i);
                let env = 0.5 - 0.5 * (z / 2.0).tanh();
                env * (1.0 + a.iter().zip(&w).map(|(a, w)| a * (w * z).sin()).sum::<f64>())
            })
            .collect()
    }

    #[test]
    fn zero_profile() {
        let g = WeightedGrid::default_window();
        let u = Profile::zeros(g);
        let f = Cubic::canonical(0.45);
        let p = evaluate_j(&u, 20.0, 0.004, 50.0, &f).unwrap();
        assert_eq!(p.total, 0.0);
        let gr = gradient_j(&u, 20.0, 0.004, 50.0, &f).unwrap();
        assert!(gr.values.iter().all(|x| *x == 0.0));
        assert_eq!(weighted_norms(&u), (0.0, 0.0, 0.0));
        assert!(normalized_j(&u, 20.0, 0.004, 50.0, &f).is_err());
    }

    #[test]
    fn exponential_ramp_seminorm() {
        // w = e^{-z} on [0, a] (shifted to end at zero): ∫e^z w'² = 1/(1-e^{-a}) after scaling
        let a = 1.0;
        let g = WeightedGrid::new(-5.0, 5.0, 10001).unwrap();
        let w = Profile::from_fn(g, |z| {
            if z <= 0.0 {
                1.0
            } else if z < a {
                ((-z).exp() - (-a).exp()) / (1.0 - (-a).exp())
            } else {
                0.0
            }
        });
        let (_, n, _) = weighted_norms(&w);
        let exact = 1.0 / (1.0 - (-a as f64).exp());
        assert!((n - exact).abs() < 1e-5 * exact, "{n} {exact}");
    }

    #[test]
    fn gradient_matches_central_differences() {
        let g = WeightedGrid::new(-12.0, 12.0, 1201).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = Cubic::canonical(0.45);
        let fun = Functional::new(g, 3.0, 0.02, 50.0, f).unwrap();
        for _ in 0..5 {
            let u = smooth_random(&mut rng, &g);
            let dir = smooth_random(&mut rng, &g);
            let e = fun.evaluate(&u).unwrap();
            let eps = 1e-6;
            let up: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a + eps * b).collect();
            let um: Vec<f64> = u.iter().zip(&dir).map(|(a, b)| a - eps * b).collect();
            let fd = (fun.parts(&up).unwrap().total - fun.parts(&um).unwrap().total) / (2.0 * eps);
            let an = fun.op.inner(&e.grad_j, &dir);
            assert!((fd - an).abs() <= 1e-6 * an.abs().max(1e-12), "{fd} {an}");
            let fdn = (fun.normalized(&up).unwrap() - fun.normalized(&um).unwrap()) / (2.0 * eps);
            let ann = fun.op.inner(&e.normalized_gradient(), &dir);
            assert!((fdn - ann).abs() <= 1e-6 * ann.abs().max(1e-12), "{fdn} {ann}");
        }
    }

    #[test]
    fn normalized_is_translation_invariant() {
        let g = WeightedGrid::new(-15.0, 15.0, 3001).unwrap();
        let f = Cubic::canonical(0.45);
        let u = Profile::from_fn(g, |z| 0.5 - 0.5 * (z / 0.3).tanh());
        let a = 0.7;
        let f1 = Functional::new(g, 5.0, 1e-3, 50.0, f).unwrap();
        let f2 = Functional::new(g.shifted(-a), 5.0, 1e-3, 50.0, f).unwrap();
        let j1 = f1.parts(&u.values).unwrap().total;
        let j2 = f2.parts(&u.values).unwrap().total;
        assert!((j2 - (-a).exp() * j1).abs() < 1e-12 * j1.abs());
        let r1 = f1.normalized(&u.values).unwrap();
        let r2 = f2.normalized(&u.values).unwrap();
        assert!((r1 - r2).abs() < 1e-10 * r1.abs());
        // N = 2 case: normalized equals J
        let n = seminorm(&g, &u.values);
        let f3 = Functional::new(g.shifted((2.0 / n).ln()), 5.0, 1e-3, 50.0, f).unwrap();
        let j3 = f3.parts(&u.values).unwrap().total;
        assert!((j3 - f3.normalized(&u.values).unwrap()).abs() < 1e-10 * j3.abs());
    }

    #[test]
    fn nonlocal_term_nonnegative() {
        let g = WeightedGrid::default_window();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Cubic::canonical(0.45);
        for _ in 0..100 {
            let u: Vec<f64> = smooth_random(&mut rng, &g).iter().map(|x| x - 0.3).collect();
            let c = rng.gen_range(0.5..20.0);
            let fun = Functional::new(g, c, 1e-3, 50.0, f).unwrap();
            assert!(fun.parts(&u).unwrap().nonlocal_term >= 0.0);
        }
    }

    #[test]
    fn poincare() {
        let g = WeightedGrid::new(-20.0, 20.0, 4001).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let m = rng.gen_range(-5.0..5.0);
            let s = rng.gen_range(0.3..3.0);
            let k = rng.gen_range(0.0..4.0);
            let w = Profile::from_fn(g, |z| {
                let t = (z - m) / s;
                if t.abs() < 1.0 {
                    (1.0 - t * t).powi(3) * (1.0 + 0.5 * (k * z).sin())
                } else {
                    0.0
                }
            });
            let (l2, n, _) = weighted_norms(&w);
            assert!(0.25 * l2 * l2 <= n);
        }
    }
}
