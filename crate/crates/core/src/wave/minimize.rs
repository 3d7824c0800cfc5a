//! Spectral projected gradient descent of the normalized energy 2J/N over an
//! admissible class.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::KahanSum;
use crate::weighted::{project_admissible, AdmissibleSpec, Evaluation, Functional};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpgOptions {
    /// Stop when the projected-gradient measure drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Sufficient-decrease constant of the backtracking rule.
    pub armijo: f64,
    /// Stop early once the energy falls below this value (used when only
    /// the sign of the infimum is needed).
    pub stop_below: Option<f64>,
    pub record_history: bool,
}

impl Default for SpgOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 100_000, armijo: 1e-4, stop_below: None, record_history: false }
    }
}

#[derive(Debug, Clone)]
pub struct SpgOutcome {
    pub u: Vec<f64>,
    /// 2J/N at `u`.
    pub value: f64,
    pub iterations: usize,
    /// Translation-invariant projected-gradient measure at `u`.
    pub pg_norm: f64,
    pub converged: bool,
    pub stopped_early: bool,
    pub history: Vec<f64>,
}

fn eval(func: &Functional, u: &[f64]) -> Result<(Evaluation, f64, Vec<f64>)> {
    let e = func.evaluate(u)?;
    if e.seminorm < 1e-14 {
        return Err(Error::Degenerate(format!("N(u) = {:e} < 1e-14", e.seminorm)));
    }
    let r = e.normalized();
    let g = e.normalized_gradient();
    Ok((e, r, g))
}

/// `p(a) - p(b)` for the potential without cancellation.
fn potential_change(f: &crate::model::Cubic, a: f64, b: f64) -> f64 {
    let d = a - b;
    let s2 = a + b;
    let s3 = a * a + a * b + b * b;
    let s4 = s2 * (a * a + b * b);
    -d * (f.a3 / 4.0 * s4 + f.a2 / 3.0 * s3 + f.a1 / 2.0 * s2 + f.a0)
}

/// 2J/N at `un` minus 2J/N at `u`, assembled from nodewise differences so
/// that changes far below the roundoff of either value are resolved.
pub fn energy_change(func: &Functional, u: &[f64], e: &Evaluation, un: &[f64], en: &Evaluation) -> f64 {
    let g = func.grid();
    let h = g.h;
    let mut dn = KahanSum::new();
    let mut dj = KahanSum::new();
    for k in 0..g.n {
        let mu = func.op.mass_scaled[k] * g.weight(k);
        let du = un[k] - u[k];
        dj.add(0.5 * mu * du * (en.v[k] + e.v[k]));
        dj.add(mu * potential_change(&func.cubic, un[k], u[k]));
        if k + 1 < g.n {
            let a = un[k + 1] - un[k];
            let b = u[k + 1] - u[k];
            dn.add((g.z(k) + 0.5 * h).exp() / h * (a - b) * (a + b));
        }
    }
    let dn = dn.value();
    let dj = dj.value() + 0.5 * func.kappa * dn;
    let (j, n, nn) = (e.parts.total, e.seminorm, en.seminorm);
    2.0 * (dj * n - j * dn) / (n * nn)
}

/// ‖P(u − t g) − u‖_μ / t scaled by √(N/2), which is invariant under
/// translation of `u`.
fn pg_measure(func: &Functional, mu: &[f64], spec: &AdmissibleSpec, u: &[f64], g: &[f64], t: f64, n: f64) -> f64 {
    let trial: Vec<f64> = u.iter().zip(g).map(|(a, b)| a - t * b).collect();
    let p = project_admissible(&trial, mu, spec);
    let d: Vec<f64> = p.iter().zip(u).map(|(a, b)| a - b).collect();
    func.op.inner(&d, &d).sqrt() / t * (0.5 * n).sqrt()
}

/// Translation-invariant projected-gradient measure of 2J/N at `u`.
pub fn projected_gradient_norm(func: &Functional, spec: &AdmissibleSpec, u: &[f64]) -> Result<f64> {
    let (e, _, g) = eval(func, u)?;
    let h = func.grid().h;
    let t0 = e.seminorm * h * h / (8.0 * func.kappa.max(1e-300));
    Ok(pg_measure(func, &func.op.mu(), spec, u, &g, t0, e.seminorm))
}

/// Minimizes 2J/N over the admissible class from `init` (projected first).
pub fn spg_minimize(func: &Functional, spec: &AdmissibleSpec, init: &[f64], opts: &SpgOptions) -> Result<SpgOutcome> {
    let mu = func.op.mu();
    let h = func.grid().h;
    let mut u = project_admissible(init, &mu, spec);
    let (mut e, mut r, mut g) = eval(func, &u)?;
    // Curvature scale of 2J/N in the μ-metric is about 8κ/(h²N).
    let t0 = |n: f64| n * h * h / (8.0 * func.kappa.max(1e-300));
    let mut alpha = t0(e.seminorm);
    let mut history = Vec::new();
    let mut pg = pg_measure(func, &mu, spec, &u, &g, t0(e.seminorm), e.seminorm);
    let mut it = 0;
    while it < opts.max_iter {
        if opts.record_history {
            history.push(r);
        }
        if pg <= opts.tol {
            break;
        }
        if let Some(s) = opts.stop_below {
            if r < s {
                return Ok(SpgOutcome { u, value: r, iterations: it, pg_norm: pg, converged: false, stopped_early: true, history });
            }
        }
        it += 1;
        let a_lo = 1e-10 * t0(e.seminorm);
        let a_hi = 1e8 * t0(e.seminorm);
        alpha = alpha.clamp(a_lo, a_hi);
        let mut step = alpha;
        let accepted = loop {
            let trial: Vec<f64> = u.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let un = project_admissible(&trial, &mu, spec);
            let d: Vec<f64> = un.iter().zip(&u).map(|(a, b)| a - b).collect();
            let slope = func.op.inner(&g, &d);
            if let Ok((en, rn, gn)) = eval(func, &un) {
                if rn.is_finite() && energy_change(func, &u, &e, &un, &en) <= opts.armijo * slope {
                    break Some((un, d, en, rn, gn));
                }
            }
            step *= 0.5;
            if step < a_lo {
                break None;
            }
        };
        let Some((un, s, en, rn, gn)) = accepted else {
            break;
        };
        let y: Vec<f64> = gn.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = func.op.inner(&s, &y);
        let ss = func.op.inner(&s, &s);
        alpha = if sy > 0.0 { ss / sy } else { a_hi };
        u = un;
        e = en;
        r = rn;
        g = gn;
        pg = pg_measure(func, &mu, spec, &u, &g, t0(e.seminorm), e.seminorm);
    }
    Ok(SpgOutcome { u, value: r, iterations: it, pg_norm: pg, converged: pg <= opts.tol, stopped_early: false, history })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ModelParams, WaveKind, WaveSystem};
    use crate::wave::{admissible_spec, initial_guess};
    use crate::weighted::WeightedGrid;

    fn setup(c: f64) -> (Functional, AdmissibleSpec, Vec<f64>) {
        let sys = WaveSystem::canonical(&ModelParams::new(0.45, 50.0, 1e-5).unwrap()).unwrap();
        let grid = WeightedGrid::with_spacing(-15.0, 10.0, 0.1).unwrap();
        let func = Functional::new(grid, c, sys.d * c * c, sys.gamma, sys.cubic).unwrap();
        let spec = admissible_spec(&sys, WaveKind::Front).unwrap();
        let init = initial_guess(&sys, WaveKind::Front, &grid, 0.0).values;
        (func, spec, init)
    }

    #[test]
    fn energy_never_increases() {
        let (func, spec, init) = setup(15.0);
        let opts = SpgOptions { record_history: true, max_iter: 2000, ..Default::default() };
        let out = spg_minimize(&func, &spec, &init, &opts).unwrap();
        assert!(out.history.len() > 2);
        for w in out.history.windows(2) {
            assert!(w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0), "{} -> {}", w[0], w[1]);
        }
        assert!(out.value <= out.history[0]);
    }

    #[test]
    fn minimizer_is_a_fixed_point() {
        let (func, spec, init) = setup(15.0);
        let opts = SpgOptions { tol: 1e-7, ..Default::default() };
        let first = spg_minimize(&func, &spec, &init, &opts).unwrap();
        assert!(first.converged, "pg {}", first.pg_norm);
        let again = spg_minimize(&func, &spec, &first.u, &opts).unwrap();
        assert_eq!(again.iterations, 0);
        assert_eq!(again.value, first.value);
        assert!(projected_gradient_norm(&func, &spec, &first.u).unwrap() <= opts.tol);
    }

    #[test]
    fn stop_below_returns_early() {
        let (func, spec, init) = setup(5.0);
        let opts = SpgOptions { stop_below: Some(0.0), ..Default::default() };
        let out = spg_minimize(&func, &spec, &init, &opts).unwrap();
        assert!(out.stopped_early && out.value < 0.0);
    }

    #[test]
    fn zero_profile_is_degenerate() {
        let (func, spec, init) = setup(15.0);
        let zero = vec![0.0; init.len()];
        assert!(matches!(spg_minimize(&func, &spec, &zero, &SpgOptions::default()), Err(Error::Degenerate(_))));
    }
}
