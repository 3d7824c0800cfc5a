//! Half-line saddle connections of `δw'' + δw' + p(w) - level = 0` computed
//! by shooting along the unstable manifold of the source equilibrium.

use serde::{Deserialize, Serialize};

use super::ode::Dopri5;
use crate::error::{Error, Result};
use crate::model::{beta_constants, Cubic};
use crate::weighted::{Profile, WeightedGrid};

/// Node spacing of shooting output.
pub const SHOOT_SPACING: f64 = 1e-3;
/// Initial offsets scanned along the unstable eigenvector.
pub const EPS_SCAN: [f64; 5] = [1e-8, 1e-7, 1e-6, 1e-5, 1e-4];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarWaveProblem {
    pub delta: f64,
    pub level: f64,
    pub nonlinearity: Cubic,
    pub source: f64,
    pub boundary_value: f64,
    pub target_equilibrium: f64,
}

impl ScalarWaveProblem {
    /// `δw'' + δw' + f(w) = 0` from 1 down to `boundary`.
    pub fn nagumo(beta: f64, delta: f64, boundary: f64) -> Self {
        Self {
            delta,
            level: 0.0,
            nonlinearity: Cubic::canonical(beta),
            source: 1.0,
            boundary_value: boundary,
            target_equilibrium: 0.0,
        }
    }

    /// `δ₀w'' + δ₀w' + f(w) - f(ν) = 0`, `w(0) = ν`, from ρ₁ upward.
    pub fn level_set(beta: f64, nu: f64) -> Result<Self> {
        let f = Cubic::canonical(beta);
        let (rho1, _, _) = intersections(nu, &f)?;
        Ok(Self {
            delta: beta_constants(beta)?.delta0,
            level: f.eval(nu),
            nonlinearity: f,
            source: rho1,
            boundary_value: nu,
            target_equilibrium: nu,
        })
    }

    /// The increasing connection from ρ₁* to μ₃* at level f(μ₃*),
    /// translated so that `w(0) = ν`.
    pub fn travel(beta: f64, nu: f64) -> Result<Self> {
        let b = beta_constants(beta)?;
        let f = Cubic::canonical(beta);
        let (rho1, _, top) = intersections(b.mu3_star, &f)?;
        Ok(Self {
            delta: b.delta0,
            level: f.eval(b.mu3_star),
            nonlinearity: f,
            source: rho1,
            boundary_value: nu,
            target_equilibrium: top,
        })
    }

    fn slope(&self) -> f64 {
        self.nonlinearity.deriv(self.source)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0) {
            return Err(Error::InvalidParams(format!("delta = {} must be positive", self.delta)));
        }
        let r = self.nonlinearity.eval(self.source) - self.level;
        if r.abs() > 1e-10 {
            return Err(Error::InvalidParams(format!("source {} is not an equilibrium (residual {r:e})", self.source)));
        }
        if !(self.slope() < 0.0) {
            return Err(Error::Hypothesis(format!("source {} is not a saddle", self.source)));
        }
        if self.boundary_value == self.source {
            return Err(Error::InvalidParams("boundary value equals the source".into()));
        }
        Ok(())
    }

    /// Unstable eigenvalue of the source.
    pub fn unstable_rate(&self) -> f64 {
        0.5 * (-1.0 + (1.0 - 4.0 * self.slope() / self.delta).sqrt())
    }

    fn rhs(&self, w: &[f64; 2]) -> [f64; 2] {
        [w[1], -w[1] - (self.nonlinearity.eval(w[0]) - self.level) / self.delta]
    }

    /// `(δ/2)w'² - F(w) - level·w`, non-increasing along solutions.
    pub fn mechanical_energy(&self, w: f64, dw: f64) -> f64 {
        0.5 * self.delta * dw * dw - self.nonlinearity.potential(w) - self.level * w
    }
}

/// Sampled connection on `(x_left, 0]` with `w(0)` at the boundary value.
#[derive(Debug, Clone, PartialEq)]
pub struct Heteroclinic {
    pub profile: Profile,
    pub derivative: Vec<f64>,
    pub source: f64,
    pub target: f64,
    pub shoot_parameter: f64,
    pub residual: f64,
    pub endpoint_error: f64,
}

impl Heteroclinic {
    /// Strict monotonicity with the given sign, nodewise.
    pub fn is_monotone(&self, sign: f64) -> bool {
        self.profile.values.windows(2).all(|p| sign * (p[1] - p[0]) > 0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Outcome {
    Crossed(f64),
    Undershoot(f64),
    Escape(f64),
}

const CHUNK: f64 = 0.05;

fn first_pass(pb: &ScalarWaveProblem, eps: f64, ode: &Dopri5) -> Result<Outcome> {
    let lam = pb.unstable_rate();
    let sigma = (pb.boundary_value - pb.source).signum();
    let f = |_x: f64, y: &[f64; 2]| pb.rhs(y);
    let mut x = 0.0;
    let mut y = [pb.source + sigma * eps, sigma * eps * lam];
    let mut h = 1e-3;
    let x_max = 200.0 / lam + 2000.0;
    let span = (pb.boundary_value - pb.source).abs() + 2.0;
    while x < x_max {
        let (y1, h1) = ode.integrate(&f, x, y, x + CHUNK, h)?;
        h = h1;
        if sigma * (y1[0] - pb.boundary_value) >= 0.0 {
            // Locate the crossing by bisection, each trial integrated from x.
            let (mut lo, mut hi) = (x, x + CHUNK);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let (ym, _) = ode.integrate(&f, x, y, mid, 1e-3)?;
                if sigma * (ym[0] - pb.boundary_value) >= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo < 1e-14 {
                    break;
                }
            }
            return Ok(Outcome::Crossed(0.5 * (lo + hi)));
        }
        if sigma * y1[1] <= 0.0 {
            return Ok(Outcome::Undershoot(y1[0]));
        }
        if (y1[0] - pb.source).abs() > span {
            return Ok(Outcome::Escape(y1[0]));
        }
        x += CHUNK;
        y = y1;
    }
    Ok(Outcome::Escape(y[0]))
}

/// Shoot along the unstable manifold of `problem.source` until the orbit
/// crosses the boundary value; resample on a grid of spacing
/// [`SHOOT_SPACING`] ending at x = 0.
pub fn shoot_heteroclinic(problem: &ScalarWaveProblem) -> Result<Heteroclinic> {
    problem.validate()?;
    let ode = Dopri5::with_tol(1e-12);
    let mut failures = Vec::new();
    let mut found = None;
    for &eps in &EPS_SCAN {
        match first_pass(problem, eps, &ode)? {
            Outcome::Crossed(x) => {
                found = Some((eps, x));
                break;
            }
            Outcome::Undershoot(w) => failures.push(format!("eps={eps:e}: undershoot, turned back at w={w:.6}")),
            Outcome::Escape(w) => failures.push(format!("eps={eps:e}: overshoot, escaped at w={w:.6}")),
        }
    }
    let (eps, x_cross) = found.ok_or_else(|| Error::NoConnection(failures.join("; ")))?;
    sample(problem, eps, x_cross, &ode)
}

fn sample(pb: &ScalarWaveProblem, eps: f64, x_cross: f64, ode: &Dopri5) -> Result<Heteroclinic> {
    let lam = pb.unstable_rate();
    let sigma = (pb.boundary_value - pb.source).signum();
    let h = SHOOT_SPACING;
    let x0 = -x_cross;
    let margin = 10.0 * h;
    let grid = WeightedGrid::with_spacing(x0 - margin, h, h)?;
    // The right end is the single node past zero; drop it below.
    let n = grid.n - 1;
    let f = |_x: f64, y: &[f64; 2]| pb.rhs(y);
    let mut w = vec![0.0; n];
    let mut q = vec![0.0; n];
    let mut state: Option<(f64, [f64; 2])> = None;
    let mut step = 1e-3;
    for i in 0..n {
        let x = if i == n - 1 { 0.0 } else { grid.z(i) };
        if x < x0 {
            let e = sigma * eps * (lam * (x - x0)).exp();
            w[i] = pb.source + e;
            q[i] = e * lam;
            continue;
        }
        let (xs, ys) = state.unwrap_or((x0, [pb.source + sigma * eps, sigma * eps * lam]));
        let (y, h1) = ode.integrate(&f, xs, ys, x, step)?;
        step = h1;
        w[i] = y[0];
        q[i] = y[1];
        state = Some((x, y));
    }
    let mut g = grid;
    g.n = n;
    g.z_right = 0.0;
    let mut residual: f64 = 0.0;
    for i in 2..n.saturating_sub(2) {
        let dq = (q[i - 2] - 8.0 * q[i - 1] + 8.0 * q[i + 1] - q[i + 2]) / (12.0 * h);
        let dw = (w[i - 2] - 8.0 * w[i - 1] + 8.0 * w[i + 1] - w[i + 2]) / (12.0 * h);
        let el = pb.delta * (dq + q[i]) + pb.nonlinearity.eval(w[i]) - pb.level;
        residual = residual.max(el.abs()).max(pb.delta * (dw - q[i]).abs());
    }
    let endpoint_error = (w[0] - pb.source).abs().max((w[n - 1] - pb.boundary_value).abs());
    Ok(Heteroclinic {
        profile: Profile::new(g, w)?,
        derivative: q,
        source: pb.source,
        target: pb.target_equilibrium,
        shoot_parameter: eps,
        residual,
        endpoint_error,
    })
}

/// The three roots of `p(ξ) = p(ν)`, ascending.
pub fn intersections(nu: f64, p: &Cubic) -> Result<(f64, f64, f64)> {
    let roots = p.shifted(p.eval(nu)).real_roots()?;
    if roots.len() != 3 {
        return Err(Error::Hypothesis(format!(
            "line v = p({nu}) meets the cubic at {} point(s), need three",
            roots.len()
        )));
    }
    Ok((roots[0], roots[1], roots[2]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::analytic_front;

    #[test]
    fn reproduces_analytic_front() {
        let beta = 0.45;
        let b = beta_constants(beta).unwrap();
        let pb = ScalarWaveProblem::nagumo(beta, b.delta0, b.beta1);
        let het = shoot_heteroclinic(&pb).unwrap();
        let (_, h) = analytic_front(beta).unwrap();
        let g = &het.profile.grid;
        let err = (0..g.n).map(|i| (het.profile.values[i] - h.value(g.z(i))).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6, "{err}");
        assert!(het.residual < 1e-8, "{}", het.residual);
        assert!(het.endpoint_error < 1e-8);
        assert!(het.is_monotone(-1.0));
    }

    #[test]
    fn intersections_at_mu3_star() {
        let f = Cubic::canonical(0.45);
        let (a, b, c) = intersections(29.0 / 30.0, &f).unwrap();
        assert!((a + 1.0 / 30.0).abs() < 1e-9);
        assert!((b - 31.0 / 60.0).abs() < 1e-9);
        assert!((c - 29.0 / 30.0).abs() < 1e-9);
        assert!((a + b - (1.45 - 29.0 / 30.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_saddle_source() {
        let mut pb = ScalarWaveProblem::nagumo(0.45, 0.005, 0.9);
        pb.source = 0.45;
        assert!(matches!(shoot_heteroclinic(&pb), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn reports_both_failure_modes() {
        // Heavy damping: the orbit from 1 cannot climb back over β.
        let pb = ScalarWaveProblem { boundary_value: -0.5, ..ScalarWaveProblem::nagumo(0.45, 0.5, -0.5) };
        match shoot_heteroclinic(&pb) {
            Err(Error::NoConnection(msg)) => assert!(msg.contains("undershoot")),
            other => panic!("{other:?}"),
        }
    }
}
