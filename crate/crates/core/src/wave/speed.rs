//! Speed selection: the largest zero of c ↦ inf 2J_c/N over the admissible
//! class.

use serde::{Deserialize, Serialize};

use super::minimize::{energy_change, projected_gradient_norm, spg_minimize, SpgOptions, SpgOutcome};
use super::newton::{BvpOptions, BvpSystem, PTC_STEPS};
use crate::error::{Error, Result};
use crate::model::{WaveKind, WaveSystem};
use crate::roots::illinois;
use crate::weighted::{AdmissibleKind, AdmissibleSpec, Functional, Profile, WeightedGrid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedOptions {
    pub grid: WeightedGrid,
    pub scan_points: usize,
    /// Upper scan end as a multiple of √(δ₀/d).
    pub scan_top: f64,
    /// Lower scan end as a multiple of min(c̲, upper end).
    pub scan_floor: f64,
    pub spg: SpgOptions,
    /// Stop when |𝒥| falls below this fraction of |𝒥| at the top of the scan.
    pub rtol: f64,
    pub max_refine: usize,
    /// Initial pulse length in the moving frame.
    pub pulse_length: f64,
    /// SPG runs to this measure (or `polish_after` iterations) before the
    /// Newton polish of the critical-point equations is attempted.
    pub polish_tol: f64,
    pub polish_after: usize,
}

impl Default for SpeedOptions {
    fn default() -> Self {
        Self {
            grid: WeightedGrid::default_window(),
            scan_points: 60,
            scan_top: 1.2,
            scan_floor: 0.5,
            spg: SpgOptions::default(),
            rtol: 1e-8,
            max_refine: 60,
            pulse_length: 10.0,
            polish_tol: 1e-6,
            polish_after: 3000,
        }
    }
}

/// Sampled speed functional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedCurve {
    pub c_samples: Vec<f64>,
    pub j_values: Vec<f64>,
    /// `(c_lo, c_hi)` with 𝒥(c_lo) < 0 < 𝒥(c_hi).
    pub bracket: Option<(f64, f64)>,
    /// The scan grid, for reproducibility.
    pub scan_grid: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct SpeedResult {
    pub c0: f64,
    pub u0: Profile,
    pub j_hat: f64,
    pub curve: SpeedCurve,
    pub spg_iterations: usize,
}

pub fn admissible_spec(system: &WaveSystem, kind: WaveKind) -> Result<AdmissibleSpec> {
    let k = match kind {
        WaveKind::Front | WaveKind::ReversedFront => AdmissibleKind::Front,
        WaveKind::Pulse => AdmissibleKind::Pulse,
    };
    AdmissibleSpec::new(k, -system.truncation.m1, system.truncation.beta2, system.mu3)
}

fn tanh_step(system: &WaveSystem, z: f64) -> f64 {
    let b = system.mid / system.top;
    0.5 - 0.5 * (z / (2.0 * (1.0 - 2.0 * b))).tanh()
}

/// Step-like initial guess: μ₃·H for fronts, a difference of two steps for
/// pulses.
pub fn initial_guess(system: &WaveSystem, kind: WaveKind, grid: &WeightedGrid, pulse_length: f64) -> Profile {
    match kind {
        WaveKind::Front | WaveKind::ReversedFront => Profile::from_fn(*grid, |z| system.mu3 * tanh_step(system, z)),
        WaveKind::Pulse => Profile::from_fn(*grid, |z| {
            system.mu3 * (tanh_step(system, z) - tanh_step(system, z + pulse_length))
        }),
    }
}

/// Rightmost downward crossing of `level` with linear interpolation.
pub fn front_position(grid: &WeightedGrid, u: &[f64], level: f64) -> Option<f64> {
    (0..u.len() - 1).rev().find(|&i| u[i] >= level && u[i + 1] < level).map(|i| {
        let t = (u[i] - level) / (u[i] - u[i + 1]);
        grid.z(i) + t * grid.h
    })
}

/// Shifts `u` by whole cells so that its front sits at the node nearest z = 0,
/// padding with the end values.
pub fn recenter(grid: &WeightedGrid, u: &[f64], level: f64) -> Vec<f64> {
    let Some(zf) = front_position(grid, u, level) else {
        return u.to_vec();
    };
    let k = (zf / grid.h).round() as isize;
    let n = u.len() as isize;
    (0..n).map(|i| u[(i + k).clamp(0, n - 1) as usize]).collect()
}

struct Scanner<'a> {
    system: &'a WaveSystem,
    kind: WaveKind,
    spec: AdmissibleSpec,
    opts: &'a SpeedOptions,
    iterations: usize,
}

impl Scanner<'_> {
    fn minimize(&mut self, c: f64, init: &[f64], sign_only: bool) -> Result<SpgOutcome> {
        let s = self.system;
        let func = Functional::new(self.opts.grid, c, s.d * c * c, s.gamma, s.cubic)?;
        let mut o = self.opts.spg;
        if sign_only {
            o.stop_below = Some(0.0);
        }
        let mut first = o;
        first.tol = o.tol.max(self.opts.polish_tol);
        first.max_iter = o.max_iter.min(self.opts.polish_after);
        let out = spg_minimize(&func, &self.spec, init, &first)?;
        self.iterations += out.iterations;
        if out.stopped_early || (out.converged && out.pg_norm <= o.tol) {
            return Ok(out);
        }
        let start = match polish(s, self.kind, &self.spec, &func, &out.u) {
            Some(p) if p.pg_norm <= o.tol => {
                return Ok(SpgOutcome { iterations: out.iterations, history: out.history, ..p });
            }
            Some(p) => p.u,
            None => out.u,
        };
        let mut rest = o;
        rest.max_iter = o.max_iter.saturating_sub(out.iterations);
        let out2 = spg_minimize(&func, &self.spec, &start, &rest)?;
        self.iterations += out2.iterations;
        if !out2.converged && !out2.stopped_early {
            return Err(Error::NonConvergence { iterations: out.iterations + out2.iterations, measure: out2.pg_norm });
        }
        Ok(out2)
    }
}

/// Newton solve of the discrete critical-point equations of 2J/N at fixed c
/// from a near-minimizer `u`, with u pinned at the node nearest its
/// mid-level crossing. Accepted only if the result stays admissible and does
/// not raise 2J/N.
pub fn polish(system: &WaveSystem, kind: WaveKind, spec: &AdmissibleSpec, func: &Functional, u: &[f64]) -> Option<SpgOutcome> {
    let grid = *func.grid();
    let zf = front_position(&grid, u, system.mu3 / 2.0)?;
    let pin = grid.index_of(zf);
    let e0 = func.evaluate(u).ok()?;
    let r0 = e0.normalized();
    let bs = BvpSystem::critical(system, kind, grid, func.op.c, pin, u[pin]);
    let opts = BvpOptions { tol: 1e-11, max_iter: 20, ..BvpOptions::default() };
    let rho = func.kappa - r0;
    let sol = bs
        .solve(u.to_vec(), e0.v.clone(), rho, &opts)
        .or_else(|_| bs.solve_ptc(u.to_vec(), e0.v.clone(), rho, &opts, 1.0, PTC_STEPS))
        .ok()?;
    let un = sol.u.values;
    if !spec.contains(&un) {
        return None;
    }
    let en = func.evaluate(&un).ok()?;
    if energy_change(func, u, &e0, &un, &en) > 1e-14 {
        return None;
    }
    let pg = projected_gradient_norm(func, spec, &un).ok()?;
    Some(SpgOutcome {
        u: un,
        value: en.normalized(),
        iterations: 0,
        pg_norm: pg,
        converged: true,
        stopped_early: false,
        history: Vec::new(),
    })
}

/// Scans c downward from `scan_top·√(δ₀/d)` on a geometric grid until the
/// minimized energy changes sign, then refines the largest zero.
pub fn find_speed(system: &WaveSystem, kind: WaveKind, opts: &SpeedOptions) -> Result<SpeedResult> {
    find_speed_from(system, kind, opts, None)
}

/// As [`find_speed`], starting the scan from `init` (recentred) when given.
pub fn find_speed_from(
    system: &WaveSystem,
    kind: WaveKind,
    opts: &SpeedOptions,
    init: Option<&[f64]>,
) -> Result<SpeedResult> {
    let spec = admissible_spec(system, kind)?;
    let grid = opts.grid;
    let c_hi = opts.scan_top * system.speed_bound();
    let c_lo = opts.scan_floor * system.c_lower.min(c_hi);
    let m = opts.scan_points.max(2);
    let scan: Vec<f64> = (0..m).map(|k| c_hi * (c_lo / c_hi).powf(k as f64 / (m - 1) as f64)).collect();
    let mut sc = Scanner { system, kind, spec, opts, iterations: 0 };
    let level = system.mu3 / 2.0;
    let mut u = match init {
        Some(v) if v.len() == grid.n => recenter(&grid, v, level),
        _ => initial_guess(system, kind, &grid, opts.pulse_length).values,
    };
    let mut cs = Vec::new();
    let mut js = Vec::new();
    let mut prev: Option<(f64, f64, Vec<f64>)> = None;
    let mut neg: Option<(f64, f64, Vec<f64>)> = None;
    for &c in &scan {
        let out = sc.minimize(c, &u, prev.is_some())?;
        cs.push(c);
        js.push(out.value);
        let uc = recenter(&grid, &out.u, level);
        if out.value < 0.0 {
            neg = Some((c, out.value, uc));
            break;
        }
        u = uc.clone();
        prev = Some((c, out.value, uc));
    }
    let curve_base = |cs: Vec<f64>, js: Vec<f64>, bracket| SpeedCurve { c_samples: cs, j_values: js, bracket, scan_grid: scan.clone() };
    let Some((c_neg, _, u_neg)) = neg else {
        return Err(Error::NoBracket(format!(
            "minimized energy positive on [{c_lo:.6}, {c_hi:.6}] (d = {})",
            system.d
        )));
    };
    let Some((c_pos, j_pos, u_pos)) = prev else {
        return Err(Error::NoBracket(format!("energy already negative at the top of the scan c = {c_hi:.6}")));
    };
    // The sign-only pass stopped early; converge the negative end.
    let neg_full = sc.minimize(c_neg, &u_neg, false)?;
    let j_neg = neg_full.value;
    let ftol = opts.rtol * js[0].abs().max(j_pos.abs());
    let mut warm = u_pos.clone();
    let mut last: Option<SpgOutcome> = None;
    let mut extra_c = Vec::new();
    let mut extra_j = Vec::new();
    let (c0, j0) = illinois(
        |c| {
            let out = sc.minimize(c, &warm, false)?;
            warm = recenter(&grid, &out.u, level);
            extra_c.push(c);
            extra_j.push(out.value);
            let v = out.value;
            last = Some(out);
            Ok(v)
        },
        c_neg,
        j_neg,
        c_pos,
        j_pos,
        1e-12 * c_pos,
        ftol,
        opts.max_refine,
    )?;
    let best = last.ok_or_else(|| Error::NonConvergence { iterations: 0, measure: f64::NAN })?;
    cs.extend(extra_c);
    js.extend(extra_j);
    let u0 = Profile::new(grid, recenter(&grid, &best.u, level))?;
    Ok(SpeedResult {
        c0,
        u0,
        j_hat: j0,
        curve: curve_base(cs, js, Some((c_neg, c_pos))),
        spg_iterations: sc.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;

    fn system() -> WaveSystem {
        WaveSystem::canonical(&ModelParams::new(0.45, 50.0, 1e-5).unwrap()).unwrap()
    }

    #[test]
    fn initial_guesses_have_the_right_shape() {
        let sys = system();
        let g = WeightedGrid::with_spacing(-30.0, 20.0, 0.1).unwrap();
        let f = initial_guess(&sys, WaveKind::Front, &g, 0.0).values;
        assert!((f[0] - sys.mu3).abs() < 1e-6 && f[f.len() - 1].abs() < 1e-6);
        assert!(f.windows(2).all(|w| w[1] <= w[0]));
        let p = initial_guess(&sys, WaveKind::Pulse, &g, 10.0).values;
        assert!(p[0].abs() < 1e-6 && p[p.len() - 1].abs() < 1e-6);
        let top = p.iter().cloned().fold(0.0, f64::max);
        assert!(top > 0.99 * sys.mu3 && top <= sys.mu3);
    }

    #[test]
    fn front_position_interpolates() {
        let g = WeightedGrid::with_spacing(-5.0, 5.0, 0.5).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|z| 1.0 - (z + 5.0) / 10.0).collect();
        assert!((front_position(&g, &u, 0.37).unwrap() - 1.3).abs() < 1e-12);
        assert!(front_position(&g, &u, 2.0).is_none());
    }

    #[test]
    fn recenter_moves_front_to_origin() {
        let sys = system();
        let g = WeightedGrid::with_spacing(-30.0, 20.0, 0.1).unwrap();
        let u = Profile::from_fn(g, |z| sys.mu3 * tanh_step(&sys, z - 4.03)).values;
        let level = 0.5 * sys.mu3;
        let r = recenter(&g, &u, level);
        assert!(front_position(&g, &r, level).unwrap().abs() <= 0.5 * g.h + 1e-12);
        assert_eq!(r[0], u[0 + 40]);
        assert_eq!(recenter(&g, &vec![0.0; g.n], level), vec![0.0; g.n]);
    }

    #[test]
    fn spec_follows_kind() {
        let sys = system();
        assert_eq!(admissible_spec(&sys, WaveKind::Front).unwrap().kind, AdmissibleKind::Front);
        assert_eq!(admissible_spec(&sys, WaveKind::Pulse).unwrap().kind, AdmissibleKind::Pulse);
    }
}
