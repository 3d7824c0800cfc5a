//! Direct integration of the FitzHugh-Nagumo system in rescaled lab
//! coordinates y = x/√d, τ = t/d:
//! u_τ = u_yy + f(u) − v, v_τ = v_yy + d(u − γv).

mod track;

pub use track::{crossings, measure_speed, rightmost_crossing, SpeedFit};

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{classify_regime, Cubic, ModelParams, WaveKind, WaveSystem};
use crate::weighted::fmt_f64;

/// Uniform lab grid on [y_left, y_right].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimGrid {
    pub y_left: f64,
    pub n: usize,
    pub h: f64,
}

impl SimGrid {
    pub fn new(y_left: f64, y_right: f64, n: usize) -> Result<Self> {
        if n < 3 || !(y_right > y_left) {
            return Err(Error::InvalidParams(format!("bad lab grid [{y_left}, {y_right}] with {n} nodes")));
        }
        Ok(Self { y_left, n, h: (y_right - y_left) / (n - 1) as f64 })
    }

    pub fn y(&self, i: usize) -> f64 {
        self.y_left + i as f64 * self.h
    }

    pub fn y_right(&self) -> f64 {
        self.y(self.n - 1)
    }

    /// Trapezoid weights, under which zero-flux diffusion conserves mass.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.n).map(|i| if i == 0 || i + 1 == self.n { 0.5 * self.h } else { self.h }).collect()
    }
}

/// Width of the scalar bistable front of the cubic in y units:
/// 4/(top·√(k/2)) for p(u) = k u (u − mid)(top − u).
pub fn transition_width(cubic: &Cubic, top: f64) -> f64 {
    4.0 / (top * (-cubic.a3 / 2.0).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState {
    pub grid: SimGrid,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub tau: f64,
    pub params: ModelParams,
    /// Largest step used so far.
    pub dtau_max: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitKind {
    Front,
    ReversedFront,
    Pulse,
    Custom { u: Vec<f64>, v: Vec<f64> },
}

fn step_profile(y: f64, y0: f64, w: f64) -> f64 {
    0.5 * (1.0 - ((y - y0) / w).tanh())
}

/// Initial data: fronts are smooth steps between μ₃ and 0 centred a quarter
/// of the way into the domain, 5 cells wide. Behind the interface v relaxes
/// toward its equilibrium over ℓ = √δ₀/(dγ), the distance the interface
/// covers while v settles; starting v at its far-field value right behind
/// the interface reverses the interface for weakly bistable cubics. The
/// pulse is a plateau of u at μ₃ of length 1.5ℓ.
pub fn init_state(kind: &InitKind, params: &ModelParams, grid: SimGrid) -> Result<SimState> {
    let regime = classify_regime(params)?;
    let c = regime.constants.ok_or_else(|| Error::Regime("no nonzero equilibria".into()))?;
    let sys = WaveSystem::canonical(params)?;
    let (mu3, ve) = (c.mu3, c.mu3 / params.gamma);
    let w = 5.0 * grid.h;
    let len = grid.y_right() - grid.y_left;
    let y0 = grid.y_left + 0.25 * len;
    let ell = (sys.delta0.sqrt() / (params.d * params.gamma)).max(w);
    // Fraction of the far-field v present at distance y0 − y behind the interface.
    let settled = |y: f64| if y < y0 { 1.0 - ((y - y0) / ell).exp() } else { 0.0 };
    let ys: Vec<f64> = (0..grid.n).map(|i| grid.y(i)).collect();
    let (u, v) = match kind {
        InitKind::Front => (
            ys.iter().map(|&y| mu3 * step_profile(y, y0, w)).collect(),
            ys.iter().map(|&y| ve * settled(y)).collect(),
        ),
        InitKind::ReversedFront => (
            ys.iter().map(|&y| mu3 * (1.0 - step_profile(y, y0, w))).collect(),
            ys.iter().map(|&y| ve * (1.0 - settled(y))).collect(),
        ),
        InitKind::Pulse => {
            // Excited plateau of length 1.5ℓ behind the interface; v keeps
            // building across it and relaxes behind the back.
            let yb = y0 - 1.5 * ell;
            let vb = ve * settled(yb);
            (
                ys.iter().map(|&y| mu3 * (step_profile(y, y0, w) - step_profile(y, yb, w))).collect(),
                ys.iter().map(|&y| if y >= yb { ve * settled(y) } else { vb * ((y - yb) / ell).exp() }).collect(),
            )
        }
        InitKind::Custom { u, v } => {
            if u.len() != grid.n || v.len() != grid.n {
                return Err(Error::InvalidParams("custom fields do not match the grid".into()));
            }
            (u.clone(), v.clone())
        }
    };
    Ok(SimState { grid, u, v, tau: 0.0, params: *params, dtau_max: 0.0 })
}

/// Crank–Nicolson factors for (I − (dτ/2)Δ) with zero-flux ends, factored
/// once per step size.
#[derive(Debug, Clone)]
pub struct CnSolver {
    dtau: f64,
    r: f64,
    cp: Vec<f64>,
    inv: Vec<f64>,
    lower: Vec<f64>,
}

impl CnSolver {
    pub fn new(n: usize, h: f64, dtau: f64) -> Self {
        let r = 0.5 * dtau / (h * h);
        // Rows: −r·u_{i−1} + (1+2r)u_i − r·u_{i+1}, mirrored ghosts at the ends.
        let lower: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else if i == n - 1 { -2.0 * r } else { -r }).collect();
        let upper: Vec<f64> = (0..n).map(|i| if i == 0 { -2.0 * r } else if i == n - 1 { 0.0 } else { -r }).collect();
        let mut cp = vec![0.0; n];
        let mut inv = vec![0.0; n];
        let mut den = 1.0 + 2.0 * r;
        inv[0] = 1.0 / den;
        cp[0] = upper[0] / den;
        for i in 1..n {
            den = 1.0 + 2.0 * r - lower[i] * cp[i - 1];
            inv[i] = 1.0 / den;
            cp[i] = upper[i] * inv[i];
        }
        Self { dtau, r, cp, inv, lower }
    }

    /// (I + (dτ/2)Δ) x with zero-flux ends.
    fn explicit_half(&self, x: &[f64], out: &mut [f64]) {
        let n = x.len();
        let r = self.r;
        out[0] = x[0] + 2.0 * r * (x[1] - x[0]);
        for i in 1..n - 1 {
            out[i] = x[i] + r * (x[i - 1] - 2.0 * x[i] + x[i + 1]);
        }
        out[n - 1] = x[n - 1] + 2.0 * r * (x[n - 2] - x[n - 1]);
    }

    /// One CN step of x_τ = x_yy + g: solves
    /// (I − (dτ/2)Δ) y = (I + (dτ/2)Δ) x + dτ·g.
    pub fn step(&self, x: &[f64], g: &[f64], out: &mut [f64]) {
        let n = x.len();
        self.explicit_half(x, out);
        for i in 0..n {
            out[i] += self.dtau * g[i];
        }
        out[0] *= self.inv[0];
        for i in 1..n {
            out[i] = (out[i] - self.lower[i] * out[i - 1]) * self.inv[i];
        }
        for i in (0..n - 1).rev() {
            out[i] -= self.cp[i] * out[i + 1];
        }
    }
}

/// Reaction terms (f(u) − v, d(u − γv)).
fn reaction(cubic: &Cubic, p: &ModelParams, u: &[f64], v: &[f64], ru: &mut [f64], rv: &mut [f64]) {
    for i in 0..u.len() {
        ru[i] = cubic.eval(u[i]) - v[i];
        rv[i] = p.d * (u[i] - p.gamma * v[i]);
    }
}

/// Stepper with the reaction either active or switched off.
pub struct Stepper {
    cn: CnSolver,
    cubic: Cubic,
    reaction_on: bool,
    buf: [Vec<f64>; 6],
}

impl Stepper {
    pub fn new(state: &SimState, dtau: f64) -> Result<Self> {
        if !(dtau > 0.0 && dtau.is_finite()) {
            return Err(Error::InvalidParams(format!("time step {dtau} must be positive")));
        }
        let n = state.grid.n;
        Ok(Self {
            cn: CnSolver::new(n, state.grid.h, dtau),
            cubic: Cubic::canonical(state.params.beta),
            reaction_on: true,
            buf: std::array::from_fn(|_| vec![0.0; n]),
        })
    }

    pub fn without_reaction(mut self) -> Self {
        self.reaction_on = false;
        self
    }

    /// One IMEX step: Crank–Nicolson diffusion with the reaction treated by
    /// Heun's predictor–corrector.
    pub fn step(&mut self, s: &mut SimState) -> Result<()> {
        let [ru, rv, up, vp, ru2, rv2] = &mut self.buf;
        if self.reaction_on {
            reaction(&self.cubic, &s.params, &s.u, &s.v, ru, rv);
        } else {
            ru.fill(0.0);
            rv.fill(0.0);
        }
        self.cn.step(&s.u, ru, up);
        self.cn.step(&s.v, rv, vp);
        if self.reaction_on {
            reaction(&self.cubic, &s.params, up, vp, ru2, rv2);
            for i in 0..ru.len() {
                ru[i] = 0.5 * (ru[i] + ru2[i]);
                rv[i] = 0.5 * (rv[i] + rv2[i]);
            }
            self.cn.step(&s.u, ru, up);
            self.cn.step(&s.v, rv, vp);
        }
        if let Some(i) = up.iter().chain(vp.iter()).position(|x| !x.is_finite()) {
            return Err(Error::BlowUp {
                tau: s.tau,
                detail: format!("non-finite field at index {} of the (u, v) stack", i),
            });
        }
        std::mem::swap(&mut s.u, up);
        std::mem::swap(&mut s.v, vp);
        s.tau += self.cn.dtau;
        s.dtau_max = s.dtau_max.max(self.cn.dtau);
        Ok(())
    }
}

/// Single-step convenience wrapper.
pub fn step(state: &mut SimState, dtau: f64) -> Result<()> {
    Stepper::new(state, dtau)?.step(state)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimKind {
    Front,
    Reversed,
    Pulse,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    FrontRight,
    FrontLeft,
    Pulse,
    Collapsed,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub params: ModelParams,
    pub n: usize,
    /// Domain length in transition widths.
    pub domain_widths: f64,
    pub dtau: f64,
    pub tau_max: f64,
    /// Minimum displacement of the tracked crossing, in transition widths.
    pub min_displacement_widths: f64,
    /// Minimum run time in units of the v relaxation time 1/(dγ); the
    /// interface speed only settles once v behind it has caught up.
    pub settle_times: f64,
    /// Time between track samples.
    pub sample_interval: f64,
}

impl SimConfig {
    pub fn new(params: ModelParams) -> Self {
        Self {
            params,
            n: 1 << 14,
            domain_widths: 400.0,
            dtau: 0.1,
            tau_max: 1.0e5,
            min_displacement_widths: 20.0,
            settle_times: 4.0,
            sample_interval: 1.0,
        }
    }

    /// Time below which a run is never stopped.
    pub fn settle_tau(&self) -> f64 {
        self.settle_times / (self.params.d * self.params.gamma)
    }

    pub fn grid(&self) -> Result<SimGrid> {
        let w = transition_width(&Cubic::canonical(self.params.beta), 1.0);
        let len = self.domain_widths * w;
        SimGrid::new(-0.5 * len, 0.5 * len, self.n)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub kind: SimKind,
    pub config: SimConfig,
    pub level: f64,
    pub level_track: Vec<(f64, f64)>,
    pub sigma_measured: f64,
    pub fit_residual: f64,
    pub sigma_predicted: Option<f64>,
    pub relative_error: Option<f64>,
    pub outcome: Outcome,
    pub tau_end: f64,
    pub displacement: f64,
    pub dtau_max: f64,
    pub h: f64,
}

/// Integrates one run and classifies it. `sigma_predicted` is the rescaled
/// speed √(dc²) from the wave solver, when available.
pub fn run_single(kind: SimKind, config: &SimConfig, sigma_predicted: Option<f64>) -> Result<(SimReport, SimState)> {
    let init = match kind {
        SimKind::Front => InitKind::Front,
        SimKind::Reversed => InitKind::ReversedFront,
        SimKind::Pulse => InitKind::Pulse,
        SimKind::Both => return Err(Error::InvalidParams("run_single takes one orientation".into())),
    };
    let s = init_state(&init, &config.params, config.grid()?)?;
    run_from(kind, config, s, sigma_predicted)
}

/// Integrates from a prepared state; `kind` selects the tracked level and
/// the classification.
pub fn run_from(kind: SimKind, config: &SimConfig, mut s: SimState, sigma_predicted: Option<f64>) -> Result<(SimReport, SimState)> {
    if kind == SimKind::Both {
        return Err(Error::InvalidParams("run_from takes one orientation".into()));
    }
    let grid = s.grid;
    let sys = WaveSystem::canonical(&config.params)?;
    let width = transition_width(&sys.cubic, 1.0);
    let mut stepper = Stepper::new(&s, config.dtau)?;
    let every = ((config.sample_interval / config.dtau).round() as usize).max(1);
    let pulse = kind == SimKind::Pulse;
    let level_of = |s: &SimState| {
        if pulse {
            0.5 * s.u.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        } else {
            0.5 * sys.mu3
        }
    };
    let level0 = level_of(&s);
    let mut track = Vec::new();
    let mut widths = Vec::new();
    let mut steps = 0usize;
    let mut left_grid = false;
    let margin = 10.0 * width;
    let settle = config.settle_tau().min(config.tau_max);
    loop {
        if steps % every == 0 {
            let level = level_of(&s);
            let cr = crossings(&grid, &s.u, level);
            match cr.last() {
                Some(&y) if y > grid.y_left + margin && y < grid.y_right() - margin => {
                    track.push((s.tau, y));
                    widths.push(if cr.len() >= 2 { y - cr[0] } else { f64::NAN });
                }
                _ => {
                    left_grid = true;
                    break;
                }
            }
            let disp = (track.last().unwrap().1 - track[0].1).abs();
            if track.len() >= 20 && disp >= config.min_displacement_widths * width && s.tau >= settle {
                break;
            }
        }
        if s.tau >= config.tau_max {
            break;
        }
        stepper.step(&mut s)?;
        steps += 1;
    }
    let sup = s.u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let fit = if track.len() >= 20 { Some(measure_speed(&track)?) } else { None };
    let displacement = track.last().map(|l| l.1 - track[0].1).unwrap_or(0.0);
    let (sigma, resid) = fit.map(|f| (f.sigma, f.residual)).unwrap_or((f64::NAN, f64::NAN));
    let outcome = if sup < 0.25 * sys.mu3 {
        Outcome::Collapsed
    } else if left_grid || fit.is_none() || !(resid <= 0.1 * displacement.abs()) {
        Outcome::Undetermined
    } else if pulse {
        let k = widths.len();
        let (w_mid, w_end) = (widths[k / 2], widths[k - 1]);
        if w_mid.is_finite() && w_end.is_finite() && (w_end - w_mid).abs() <= 0.2 * w_mid.abs() {
            Outcome::Pulse
        } else if sigma > 0.0 {
            Outcome::FrontRight
        } else {
            Outcome::FrontLeft
        }
    } else if sigma > 0.0 {
        Outcome::FrontRight
    } else {
        Outcome::FrontLeft
    };
    let relative_error = sigma_predicted.map(|p| ((sigma - p) / p).abs());
    let report = SimReport {
        kind,
        config: *config,
        level: level0,
        level_track: track,
        sigma_measured: sigma,
        fit_residual: resid,
        sigma_predicted,
        relative_error,
        outcome,
        tau_end: s.tau,
        displacement,
        dtau_max: s.dtau_max,
        h: grid.h,
    };
    Ok((report, s))
}

/// Runs the requested experiment; `Both` runs the two front orientations at
/// identical parameters. `predicted` maps a kind to its BVP speed √(dc²).
pub fn run_experiment(
    kind: SimKind,
    config: &SimConfig,
    predicted: impl Fn(SimKind) -> Option<f64>,
) -> Result<Vec<SimReport>> {
    let kinds = if kind == SimKind::Both { vec![SimKind::Front, SimKind::Reversed] } else { vec![kind] };
    kinds.into_iter().map(|k| run_single(k, config, predicted(k)).map(|r| r.0)).collect()
}

/// Both invasions advance: each run moves its crossing toward the deposed
/// state with positive speed.
pub fn bidirectional(reports: &[SimReport]) -> bool {
    let ok = |k: SimKind| {
        reports.iter().any(|r| r.kind == k && r.outcome == Outcome::FrontRight && r.sigma_measured > 0.0)
    };
    ok(SimKind::Front) && ok(SimKind::Reversed)
}

/// Writes `tau,y,u,v` for every `stride`-th node.
pub fn write_snapshot<W: Write>(s: &SimState, stride: usize, header: bool, w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().has_headers(false).from_writer(w);
    if header {
        wr.write_record(["tau", "y", "u", "v"])?;
    }
    for i in (0..s.grid.n).step_by(stride.max(1)) {
        wr.write_record([fmt_f64(s.tau), fmt_f64(s.grid.y(i)), fmt_f64(s.u[i]), fmt_f64(s.v[i])])?;
    }
    wr.flush()?;
    Ok(())
}

/// Wave kind a simulation orientation corresponds to.
pub fn wave_kind(kind: SimKind) -> Option<WaveKind> {
    match kind {
        SimKind::Front => Some(WaveKind::Front),
        SimKind::Reversed => Some(WaveKind::ReversedFront),
        SimKind::Pulse => Some(WaveKind::Pulse),
        SimKind::Both => None,
    }
}
