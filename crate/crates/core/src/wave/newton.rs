//! Newton refinement of the full traveling-wave boundary-value problem in the
//! unknowns (u, v, c).
//!
//! Unknowns are interleaved per node as (u_i, v_i, c_i) with the chain
//! c_i = c_{i±1} running away from the phase node, which keeps the Jacobian
//! banded (three sub- and super-diagonals per block).

use serde::{Deserialize, Serialize};

use super::speed::front_position;
use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::model::{Equilibrium, WaveKind, WaveSystem};
use crate::weighted::{NonlocalOperator, Profile, WeightedGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BvpOptions {
    pub h: f64,
    pub z_right: f64,
    /// Left window bounds: the window extends `tail_decades`/slow rate to the
    /// left, clamped to [min_left, max_left].
    pub min_left: f64,
    pub max_left: f64,
    pub tail_decades: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BvpOptions {
    fn default() -> Self {
        Self { h: 0.01, z_right: 30.0, min_left: 30.0, max_left: 3000.0, tail_decades: 23.0, tol: 1e-10, max_iter: 40 }
    }
}

#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub c: f64,
    pub u: Profile,
    pub v: Profile,
    /// Max-norm residual of the discrete system (all rows).
    pub residual: f64,
    pub iterations: usize,
}

/// Step budget of the pseudo-transient fallback.
pub const PTC_STEPS: usize = 1000;

/// Equilibrium reached as z → −∞.
pub fn left_state(system: &WaveSystem, kind: WaveKind) -> (Equilibrium, f64, f64) {
    match kind {
        WaveKind::Pulse => (Equilibrium::Origin, 0.0, 0.0),
        _ => (Equilibrium::Mu3, system.mu3, system.mu3 / system.gamma),
    }
}

/// What the scalar unknown of the discrete system is.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    /// Traveling-wave problem: the scalar is the speed c, κ = d c², decay
    /// conditions at both ends.
    Wave,
    /// Critical points of 2J/N at fixed speed c: the scalar is the effective
    /// diffusion ρ = κ − 2J/N, with the natural end conditions of the
    /// discrete functional.
    Critical { c: f64 },
}

/// Discrete traveling-wave system on a fixed grid.
pub struct BvpSystem<'a> {
    pub system: &'a WaveSystem,
    pub kind: WaveKind,
    pub grid: WeightedGrid,
    pub phase_index: usize,
    pub phase_value: f64,
    pub mode: Mode,
}

struct Rows {
    op: NonlocalOperator,
    pl: [[f64; 2]; 2],
    pr: [[f64; 2]; 2],
    kappa: f64,
}

impl<'a> BvpSystem<'a> {
    pub fn new(system: &'a WaveSystem, kind: WaveKind, grid: WeightedGrid) -> Self {
        let phase_index = grid.index_of(0.0);
        Self { system, kind, grid, phase_index, phase_value: system.phase_level, mode: Mode::Wave }
    }

    /// Critical-point system at speed c with u pinned at node `pin`.
    pub fn critical(system: &'a WaveSystem, kind: WaveKind, grid: WeightedGrid, c: f64, pin: usize, value: f64) -> Self {
        Self { system, kind, grid, phase_index: pin, phase_value: value, mode: Mode::Critical { c } }
    }

    fn rows(&self, s: f64) -> Result<Rows> {
        match self.mode {
            Mode::Wave => {
                let op = NonlocalOperator::new(self.grid, s, self.system.gamma)?;
                let (eq, _, _) = left_state(self.system, self.kind);
                let pl = self.system.spectral(s, eq)?.left_decay_matrix();
                let pr = self.system.spectral(s, Equilibrium::Origin)?.right_decay_matrix();
                Ok(Rows { op, pl, pr, kappa: self.system.d * s * s })
            }
            Mode::Critical { c } => {
                let op = NonlocalOperator::new(self.grid, c, self.system.gamma)?;
                Ok(Rows { op, pl: [[0.0; 2]; 2], pr: [[0.0; 2]; 2], kappa: s })
            }
        }
    }

    fn with_kappa(r: &Rows, kappa: f64) -> Rows {
        Rows { op: r.op.clone(), pl: r.pl, pr: r.pr, kappa }
    }

    /// (e^{h/2}(u_{i+1} − u_i) − e^{−h/2}(u_i − u_{i−1}))/(h m_i), with the
    /// missing neighbour dropped at the ends.
    fn lap(&self, r: &Rows, u: &[f64], i: usize) -> f64 {
        let n = u.len();
        let h = self.grid.h;
        let mut d = 0.0;
        if i + 1 < n {
            d += (0.5 * h).exp() * (u[i + 1] - u[i]);
        }
        if i > 0 {
            d -= (-0.5 * h).exp() * (u[i] - u[i - 1]);
        }
        d / (h * r.op.mass_scaled[i])
    }

    /// Residual rows (u-equation, v-equation, scalar/phase) per node.
    fn residual_with(&self, r: &Rows, u: &[f64], v: &[f64], s: &[f64]) -> Vec<f64> {
        let n = self.grid.n;
        let h = self.grid.h;
        let (_, ul, vl) = left_state(self.system, self.kind);
        let robin = self.mode == Mode::Wave;
        let vrow = r.op.residual(u, v);
        let mut out = vec![0.0; 3 * n];
        for i in 0..n {
            out[3 * i] = if robin && i == 0 {
                let du = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
                du - r.pl[0][0] * (u[0] - ul) - r.pl[0][1] * (v[0] - vl)
            } else if robin && i == n - 1 {
                let du = (3.0 * u[i] - 4.0 * u[i - 1] + u[i - 2]) / (2.0 * h);
                du - r.pr[0][0] * u[i] - r.pr[0][1] * v[i]
            } else {
                r.kappa * self.lap(r, u, i) + self.system.cubic.eval(u[i]) - v[i]
            };
            out[3 * i + 1] = vrow[i];
            let p = self.phase_index;
            out[3 * i + 2] = match i.cmp(&p) {
                std::cmp::Ordering::Less => s[i] - s[i + 1],
                std::cmp::Ordering::Greater => s[i] - s[i - 1],
                std::cmp::Ordering::Equal => u[i] - self.phase_value,
            };
        }
        out
    }

    /// Residual of the discrete system at a uniform scalar.
    pub fn residual(&self, u: &[f64], v: &[f64], s: f64) -> Result<Vec<f64>> {
        let r = self.rows(s)?;
        Ok(self.residual_with(&r, u, v, &vec![s; self.grid.n]))
    }

    fn jacobian(&self, r: &Rows, u: &[f64], v: &[f64], s: f64) -> Result<BandMatrix> {
        let n = self.grid.n;
        let h = self.grid.h;
        let (ep, em) = ((0.5 * h).exp(), (-0.5 * h).exp());
        let robin = self.mode == Mode::Wave;
        let mut jac = BandMatrix::new(3 * n, 6, 6);
        // ∂/∂s by central differences of the whole residual.
        let eps = 1e-6 * s.abs();
        let (rsp, rsm) = match self.mode {
            Mode::Wave => (self.rows(s + eps)?, self.rows(s - eps)?),
            Mode::Critical { .. } => (Self::with_kappa(r, s + eps), Self::with_kappa(r, s - eps)),
        };
        let rp = self.residual_with(&rsp, u, v, &vec![s + eps; n]);
        let rm = self.residual_with(&rsm, u, v, &vec![s - eps; n]);
        let k = &r.op.stiffness;
        let p = self.phase_index;
        for i in 0..n {
            let (ru, rv, rc) = (3 * i, 3 * i + 1, 3 * i + 2);
            if robin && i == 0 {
                jac.add(ru, 0, -1.5 / h - r.pl[0][0]);
                jac.add(ru, 3, 2.0 / h);
                jac.add(ru, 6, -0.5 / h);
                jac.add(ru, 1, -r.pl[0][1]);
            } else if robin && i == n - 1 {
                jac.add(ru, ru, 1.5 / h - r.pr[0][0]);
                jac.add(ru, ru - 3, -2.0 / h);
                jac.add(ru, ru - 6, 0.5 / h);
                jac.add(ru, rv, -r.pr[0][1]);
            } else {
                let sc = r.kappa / (h * r.op.mass_scaled[i]);
                let mut diag = self.system.cubic.deriv(u[i]);
                if i + 1 < n {
                    jac.add(ru, ru + 3, sc * ep);
                    diag -= sc * ep;
                }
                if i > 0 {
                    jac.add(ru, ru - 3, sc * em);
                    diag -= sc * em;
                }
                jac.add(ru, ru, diag);
                jac.add(ru, rv, -1.0);
            }
            jac.add(ru, rc, (rp[ru] - rm[ru]) / (2.0 * eps));
            let ms = r.op.mass_scaled[i];
            jac.add(rv, rv, k.diag[i] / ms);
            if i > 0 {
                jac.add(rv, rv - 3, k.lower[i] / ms);
            }
            if i + 1 < n {
                jac.add(rv, rv + 3, k.upper[i] / ms);
            }
            jac.add(rv, ru, -1.0);
            jac.add(rv, rc, (rp[rv] - rm[rv]) / (2.0 * eps));
            match i.cmp(&p) {
                std::cmp::Ordering::Less => {
                    jac.add(rc, rc, 1.0);
                    jac.add(rc, rc + 3, -1.0);
                }
                std::cmp::Ordering::Greater => {
                    jac.add(rc, rc, 1.0);
                    jac.add(rc, rc - 3, -1.0);
                }
                std::cmp::Ordering::Equal => jac.add(rc, ru, 1.0),
            }
        }
        Ok(jac)
    }

    /// Attainable residual in floating point: 64ε·max_i Σ_j |J_ij x_j|.
    fn roundoff_floor(&self, jac: &BandMatrix, u: &[f64], v: &[f64], c: f64) -> f64 {
        let x: Vec<f64> = (0..self.grid.n).flat_map(|i| [u[i].abs(), v[i].abs(), c]).collect();
        let n3 = x.len();
        let mut worst = 0.0f64;
        for i in 0..n3 {
            let lo = i.saturating_sub(6);
            let hi = (i + 6).min(n3 - 1);
            let s: f64 = (lo..=hi).map(|j| (jac.get(i, j) * x[j]).abs()).sum();
            worst = worst.max(s);
        }
        64.0 * f64::EPSILON * worst
    }

    /// Damped Newton from (u, v, c). Stops at `opts.tol`, or when damping
    /// stalls with the residual already at the roundoff floor.
    pub fn solve(&self, mut u: Vec<f64>, mut v: Vec<f64>, mut c: f64, opts: &BvpOptions) -> Result<BvpSolution> {
        let n = self.grid.n;
        let norm2 = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let maxn = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let mut rows = self.rows(c)?;
        let mut res = self.residual_with(&rows, &u, &v, &vec![c; n]);
        let mut iterations = 0;
        let mut floor: f64;
        while maxn(&res) > opts.tol {
            if iterations >= opts.max_iter {
                return Err(Error::NewtonDivergence(format!(
                    "residual {:e} after {iterations} steps",
                    maxn(&res)
                )));
            }
            let jac = self.jacobian(&rows, &u, &v, c)?;
            floor = self.roundoff_floor(&jac, &u, &v, c);
            let dx = jac.solve(&res)?;
            let r0 = norm2(&res);
            let mut t = 1.0;
            loop {
                let un: Vec<f64> = (0..n).map(|i| u[i] - t * dx[3 * i]).collect();
                let vn: Vec<f64> = (0..n).map(|i| v[i] - t * dx[3 * i + 1]).collect();
                let cn = c - t * dx[3 * self.phase_index + 2];
                if (cn > 0.0 || self.mode != Mode::Wave) && un.iter().chain(&vn).all(|x| x.is_finite()) {
                    let rn_rows = self.rows(cn)?;
                    let rn = self.residual_with(&rn_rows, &un, &vn, &vec![cn; n]);
                    if norm2(&rn) < (1.0 - 1e-4 * t) * r0 || maxn(&rn) <= opts.tol {
                        u = un;
                        v = vn;
                        c = cn;
                        rows = rn_rows;
                        res = rn;
                        break;
                    }
                }
                t *= 0.5;
                if t < 1e-6 && maxn(&res) <= floor {
                    // Stagnation at the attainable accuracy.
                    return self.finish(u, v, c, maxn(&res), iterations);
                }
                if t < 1e-6 {
                    return Err(Error::NewtonDivergence(format!(
                        "damped steps exhausted at residual {:e} (step {iterations})",
                        maxn(&res)
                    )));
                }
            }
            iterations += 1;
        }
        self.finish(u, v, c, maxn(&res), iterations)
    }

    /// Pseudo-transient continuation: Newton steps on
    /// `(J − D/Δt) δ = −F`, where D selects the differential u-rows, so that
    /// early steps follow the implicit flow u_t = κ(u'' + u') + f(u) − v and
    /// late steps become Newton steps. Δt grows by the residual ratio.
    pub fn solve_ptc(
        &self,
        mut u: Vec<f64>,
        mut v: Vec<f64>,
        mut s: f64,
        opts: &BvpOptions,
        dt0: f64,
        max_steps: usize,
    ) -> Result<BvpSolution> {
        let n = self.grid.n;
        let norm2 = |r: &[f64]| r.iter().map(|x| x * x).sum::<f64>().sqrt();
        let maxn = |r: &[f64]| r.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let robin = self.mode == Mode::Wave;
        let mut rows = self.rows(s)?;
        let mut res = self.residual_with(&rows, &u, &v, &vec![s; n]);
        let mut dt = dt0;
        let mut steps = 0;
        while maxn(&res) > opts.tol {
            if steps >= max_steps {
                return Err(Error::NewtonDivergence(format!(
                    "pseudo-transient continuation stalled at residual {:e} after {steps} steps",
                    maxn(&res)
                )));
            }
            let mut jac = self.jacobian(&rows, &u, &v, s)?;
            let floor = self.roundoff_floor(&jac, &u, &v, s);
            for i in 0..n {
                if !(robin && (i == 0 || i == n - 1)) {
                    jac.add(3 * i, 3 * i, -1.0 / dt);
                }
            }
            let dx = jac.solve(&res)?;
            let un: Vec<f64> = (0..n).map(|i| u[i] - dx[3 * i]).collect();
            let vn: Vec<f64> = (0..n).map(|i| v[i] - dx[3 * i + 1]).collect();
            let sn = s - dx[3 * self.phase_index + 2];
            steps += 1;
            let ok = (sn > 0.0 || !robin) && un.iter().chain(&vn).all(|x| x.is_finite());
            let next = if ok {
                let r = self.rows(sn)?;
                let f = self.residual_with(&r, &un, &vn, &vec![sn; n]);
                Some((r, f))
            } else {
                None
            };
            match next {
                Some((r, f)) if norm2(&f) < 10.0 * norm2(&res) => {
                    if maxn(&res) <= floor && maxn(&f) > 0.5 * maxn(&res) {
                        // Stagnation at the attainable accuracy.
                        break;
                    }
                    let ratio = norm2(&res) / norm2(&f).max(f64::MIN_POSITIVE);
                    dt = (dt * ratio.clamp(2.0, 10.0)).min(1e14);
                    u = un;
                    v = vn;
                    s = sn;
                    rows = r;
                    res = f;
                }
                _ => {
                    if dt <= 1e-6 * dt0 {
                        return Err(Error::NewtonDivergence("pseudo-transient step collapsed".into()));
                    }
                    if maxn(&res) <= floor {
                        break;
                    }
                    dt *= 0.1;
                }
            }
        }
        self.finish(u, v, s, maxn(&res), steps)
    }

    fn finish(&self, u: Vec<f64>, v: Vec<f64>, c: f64, residual: f64, iterations: usize) -> Result<BvpSolution> {
        Ok(BvpSolution { c, u: Profile::new(self.grid, u)?, v: Profile::new(self.grid, v)?, residual, iterations })
    }
}

/// Slowest decay rate toward the left equilibrium.
pub fn left_slow_rate(system: &WaveSystem, kind: WaveKind, c: f64) -> Result<f64> {
    let (eq, _, _) = left_state(system, kind);
    Ok(system.spectral(c, eq)?.s3)
}

/// BVP window for a wave of speed c.
pub fn bvp_grid(system: &WaveSystem, kind: WaveKind, c: f64, opts: &BvpOptions) -> Result<WeightedGrid> {
    let rate = left_slow_rate(system, kind, c)?;
    let zl = (opts.tail_decades / rate).clamp(opts.min_left, opts.max_left);
    WeightedGrid::with_spacing(-zl, opts.z_right, opts.h)
}

/// Transfers a minimizer onto the BVP grid: translates its phase crossing to
/// z = 0 and continues it beyond its window by the linear decay modes.
pub fn transfer_profile(system: &WaveSystem, kind: WaveKind, c: f64, u: &Profile, grid: &WeightedGrid) -> Result<Vec<f64>> {
    let zf = front_position(&u.grid, &u.values, system.phase_level)
        .ok_or_else(|| Error::Degenerate("profile never crosses the phase level".into()))?;
    let (eq, ul, _) = left_state(system, kind);
    let sl = system.spectral(c, eq)?.s3;
    let sr = system.spectral(c, Equilibrium::Origin)?.s2;
    let (a, b) = (u.grid.z_left, u.grid.z_right);
    let (ua, ub) = (u.values[0], u.values[u.len() - 1]);
    Ok(grid
        .nodes()
        .into_iter()
        .map(|z| {
            let s = z + zf;
            if s < a {
                ul + (ua - ul) * (sl * (s - a)).exp()
            } else if s > b {
                ub * (sr * (s - b)).exp()
            } else {
                u.interpolate(s)
            }
        })
        .collect())
}

/// Newton refinement of a minimizer (c_init, u_init).
pub fn refine_bvp(
    system: &WaveSystem,
    kind: WaveKind,
    c_init: f64,
    u_init: &Profile,
    opts: &BvpOptions,
) -> Result<BvpSolution> {
    let grid = bvp_grid(system, kind, c_init, opts)?;
    let u = transfer_profile(system, kind, c_init, u_init, &grid)?;
    let v = NonlocalOperator::new(grid, c_init, system.gamma)?.apply(&u)?;
    let bs = BvpSystem::new(system, kind, grid);
    bs.solve(u.clone(), v.clone(), c_init, opts).or_else(|_| bs.solve_ptc(u, v, c_init, opts, 1.0, PTC_STEPS))
}
