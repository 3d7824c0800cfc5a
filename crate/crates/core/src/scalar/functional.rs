//! Exponentially weighted energies of scalar profiles on `(x_left, x_right]`.

use serde::{Deserialize, Serialize};

use crate::linalg::KahanSum;
use crate::model::Cubic;
use crate::weighted::Profile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionalKind {
    /// `∫ e^x {δ₀/2 w'² + F(w)}`.
    IStar,
    /// `∫ e^x {δ/2 w'² + F(w)}`.
    IDelta { delta: f64 },
    /// `∫ e^x {δ₀/2 w'² + F(w) + f(ν)w}`.
    KNu { nu: f64 },
}

/// Weighted energy of `w` with the constant extension `w(x_left)` to the
/// left of the window. Cell integrals of `e^x` are exact against the
/// piecewise-linear interpolant of `w` (gradient term) and of the
/// potential values (potential term).
pub fn evaluate_half_line_functional(w: &Profile, kind: FunctionalKind, f: &Cubic, delta0: f64) -> f64 {
    let (delta, slope) = match kind {
        FunctionalKind::IStar => (delta0, 0.0),
        FunctionalKind::IDelta { delta } => (delta, 0.0),
        FunctionalKind::KNu { nu } => (delta0, f.eval(nu)),
    };
    let g = |xi: f64| f.potential(xi) + slope * xi;
    let grid = &w.grid;
    let h = grid.h;
    let eh = h.exp_m1();
    // ∫₀^h e^s (s/h) ds
    let lin = ((h - 1.0) * h.exp() + 1.0) / h;
    let v = &w.values;
    let mut acc = KahanSum::new();
    acc.add(grid.z_left.exp() * g(v[0]));
    for k in 0..grid.n - 1 {
        let ek = grid.z(k).exp();
        let du = v[k + 1] - v[k];
        let (a, b) = (g(v[k]), g(v[k + 1]));
        acc.add(ek * (0.5 * delta * eh * (du / h).powi(2) + a * eh + (b - a) * lin));
    }
    acc.value()
}

/// `F(μ₃ + a) < F(μ₃ - a)` for every sampled `a ∈ (0, 1 - μ₃)`; returns the
/// smallest margin `F(μ₃ - a) - F(μ₃ + a)` observed.
pub fn reflection_margin(f: &Cubic, mu3: f64, samples: usize) -> f64 {
    (1..samples)
        .map(|k| {
            let a = (1.0 - mu3) * k as f64 / samples as f64;
            f.potential(mu3 - a) - f.potential(mu3 + a)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Reflection competitor of a decreasing trial `W` with `W(0) = μ₃`:
/// `2μ₃ - W` where `2μ₃-1 ≤ W ≤ μ₃`, 1 where `W < 2μ₃-1`, W above μ₃.
pub fn reflection_competitor(w: &Profile, mu3: f64) -> Profile {
    let low = 2.0 * mu3 - 1.0;
    let values = w
        .values
        .iter()
        .map(|&x| {
            if x > mu3 {
                x
            } else if x >= low {
                2.0 * mu3 - x
            } else {
                1.0
            }
        })
        .collect();
    Profile { grid: w.grid, values, frame: w.frame }
}
