//! Profile checks for refined waves and decay-rate fits.

use serde::{Deserialize, Serialize};

use crate::model::{Equilibrium, WaveKind, WaveSystem};
use crate::weighted::{seminorm, Profile};

/// Values below this are treated as zero in sign and monotonicity scans.
pub const NOISE_FLOOR: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

/// One check with the measured quantity and the bound it was compared with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub status: CheckStatus,
    pub measured: Option<f64>,
    pub bound: Option<f64>,
}

impl Check {
    pub fn new(ok: bool, measured: f64, bound: f64) -> Self {
        let status = if ok { CheckStatus::Pass } else { CheckStatus::Fail };
        Self { status, measured: Some(measured), bound: Some(bound) }
    }

    pub fn na() -> Self {
        Self { status: CheckStatus::NotApplicable, measured: None, bound: None }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFits {
    pub right_rate: f64,
    pub right_expected: f64,
    pub left_rate: f64,
    pub left_expected: f64,
}

impl DecayFits {
    pub fn right_error(&self) -> f64 {
        ((self.right_rate - self.right_expected) / self.right_expected).abs()
    }

    pub fn left_error(&self) -> f64 {
        ((self.left_rate - self.left_expected) / self.left_expected).abs()
    }
}

/// Extrema and crossings located on the profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    pub zeta0: Option<f64>,
    pub zeta_max: f64,
    pub u_max: f64,
    pub zeta_min: f64,
    pub u_min: f64,
    pub v_at_zeta_max: f64,
    pub sign_changes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub landmarks: Landmarks,
    pub sign_changes: Check,
    pub max_below_one: Check,
    pub monotone_segments: Check,
    pub v_positive: Check,
    pub v_decreasing: Check,
    pub v_below_equilibrium: Check,
    pub psi2_positive: Check,
    pub big_psi2_negative: Check,
    pub kappa_below_delta0: Check,
    pub speed_bound: Check,
    pub zeta_beta_window: Check,
    pub measure_bound: Check,
    pub constraints_inactive: Check,
    pub right_decay: Check,
    pub left_decay: Check,
    pub decay_fits: DecayFits,
}

impl ValidationReport {
    pub fn checks(&self) -> Vec<(&'static str, &Check)> {
        vec![
            ("sign_changes", &self.sign_changes),
            ("max_below_one", &self.max_below_one),
            ("monotone_segments", &self.monotone_segments),
            ("v_positive", &self.v_positive),
            ("v_decreasing", &self.v_decreasing),
            ("v_below_equilibrium", &self.v_below_equilibrium),
            ("psi2_positive", &self.psi2_positive),
            ("big_psi2_negative", &self.big_psi2_negative),
            ("kappa_below_delta0", &self.kappa_below_delta0),
            ("speed_bound", &self.speed_bound),
            ("zeta_beta_window", &self.zeta_beta_window),
            ("measure_bound", &self.measure_bound),
            ("constraints_inactive", &self.constraints_inactive),
            ("right_decay", &self.right_decay),
            ("left_decay", &self.left_decay),
        ]
    }

    pub fn failures(&self) -> Vec<String> {
        self.checks().into_iter().filter(|(_, c)| !c.passed()).map(|(n, _)| n.to_string()).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.failures().is_empty()
    }
}

/// Least-squares slope of log|y| against z over nodes with
/// |y| ∈ [lo, hi]; NaN if fewer than 10 such nodes.
pub fn log_slope(z: &[f64], y: &[f64], lo: f64, hi: f64) -> f64 {
    let pts: Vec<(f64, f64)> =
        z.iter().zip(y).filter(|(_, y)| y.abs() >= lo && y.abs() <= hi).map(|(z, y)| (*z, y.abs().ln())).collect();
    if pts.len() < 10 {
        return f64::NAN;
    }
    let m = pts.len() as f64;
    let zm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - zm) * (p.1 - ym)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - zm).powi(2)).sum();
    sxy / sxx
}

/// Tail decay rates: log|u| right of `right_from` against s₂ at the origin
/// and log|u − ū| left of `left_to` against the slow exponent of the left
/// equilibrium. Each fit uses the band where the deviation lies between
/// 1e-10 and 1e-4 of its maximum over the tail, below which roundoff
/// dominates.
pub fn decay_fits(system: &WaveSystem, kind: WaveKind, c: f64, u: &Profile, left_to: usize, right_from: usize) -> DecayFits {
    let z = u.grid.nodes();
    let tail_fit = |z: &[f64], y: &[f64]| {
        let m = y.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        log_slope(z, y, 1e-10 * m, 1e-4 * m)
    };
    let right_rate = tail_fit(&z[right_from..], &u.values[right_from..]);
    let (eq, ul) = match kind {
        WaveKind::Pulse => (Equilibrium::Origin, 0.0),
        _ => (Equilibrium::Mu3, system.mu3),
    };
    let dev: Vec<f64> = u.values[..left_to].iter().map(|x| x - ul).collect();
    let left_rate = tail_fit(&z[..left_to], &dev);
    let right_expected = system.spectral(c, Equilibrium::Origin).map(|s| s.s2).unwrap_or(f64::NAN);
    let left_expected = system.spectral(c, eq).map(|s| s.s3).unwrap_or(f64::NAN);
    DecayFits { right_rate, right_expected, left_rate, left_expected }
}

/// Linear interpolation of the zero of y between nodes i and i+1.
fn cross(z: &[f64], y: &[f64], i: usize, level: f64) -> f64 {
    let t = (y[i] - level) / (y[i] - y[i + 1]);
    z[i] + t * (z[i + 1] - z[i])
}

/// Vertex of the parabola through three nodes around i.
fn vertex(z: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    if i == 0 || i + 1 >= y.len() {
        return (z[i], y[i]);
    }
    let (a, b, c) = (y[i - 1], y[i], y[i + 1]);
    let den = a - 2.0 * b + c;
    if den == 0.0 {
        return (z[i], b);
    }
    let t = 0.5 * (a - c) / den;
    let h = z[i + 1] - z[i];
    (z[i] + t * h, b - 0.25 * (a - c) * t)
}

/// Sign changes of y, ignoring values with |y| below the floor.
pub fn count_sign_changes(y: &[f64], floor: f64) -> (usize, Vec<usize>) {
    let mut last = 0.0f64;
    let mut last_i = 0;
    let mut at = Vec::new();
    for (i, &x) in y.iter().enumerate() {
        if x.abs() <= floor {
            continue;
        }
        if last != 0.0 && x.signum() != last.signum() {
            at.push(last_i);
        }
        last = x;
        last_i = i;
    }
    (at.len(), at)
}

/// Largest violation of monotonicity (sign +1 increasing, −1 decreasing) on
/// y[a..=b].
fn monotone_violation(y: &[f64], a: usize, b: usize, sign: f64) -> f64 {
    (a..b).map(|i| -(sign * (y[i + 1] - y[i]))).fold(0.0f64, f64::max)
}

/// Evaluates every profile check for a wave of `system` with speed c. For a
/// reversed front, `system` is the transformed system and (u, v) are the
/// transformed profiles.
pub fn validate_in_system(system: &WaveSystem, kind: WaveKind, c: f64, u: &Profile, v: &Profile) -> ValidationReport {
    let z = u.grid.nodes();
    let n = z.len();
    let uu = &u.values;
    let vv = &v.values;
    let kappa = system.d * c * c;
    let pulse = kind == WaveKind::Pulse;
    let floor = NOISE_FLOOR;

    let (sc, at) = count_sign_changes(uu, floor);
    let zeta0 = at.first().map(|&i| {
        let j = (i..n - 1).find(|&j| uu[j].signum() != uu[j + 1].signum()).unwrap_or(i);
        cross(&z, uu, j, 0.0)
    });
    let i_max = (0..n).max_by(|&a, &b| uu[a].total_cmp(&uu[b])).unwrap();
    let i_min = (i_max..n).min_by(|&a, &b| uu[a].total_cmp(&uu[b])).unwrap();
    // Pulses also have a minimum behind the back.
    let i_lmin = if pulse { (0..=i_max).min_by(|&a, &b| uu[a].total_cmp(&uu[b])).unwrap() } else { 0 };
    let (zeta_max, u_max) = vertex(&z, uu, i_max);
    let (zeta_min, u_min) = vertex(&z, uu, i_min);
    let v_at_zeta_max = v.interpolate(zeta_max);
    let landmarks = Landmarks { zeta0, zeta_max, u_max, zeta_min, u_min, v_at_zeta_max, sign_changes: sc };

    let want_changes = if pulse { 2 } else { 1 };
    let sign_changes = Check::new(sc == want_changes, sc as f64, want_changes as f64);
    let max_below_one = Check::new(u_max < system.top, u_max, system.top);
    let mono = monotone_violation(uu, 0, i_max, 1.0)
        .max(monotone_violation(uu, i_max, i_min, -1.0))
        .max(monotone_violation(uu, i_min, n - 1, 1.0));
    let monotone_segments = if pulse { Check::na() } else { Check::new(mono <= floor, mono, floor) };

    let veq = system.mu3 / system.gamma;
    let (v_positive, v_decreasing, v_below_equilibrium, psi2_positive, big_psi2_negative, zeta_beta_window, measure_bound) =
        if pulse {
            (Check::na(), Check::na(), Check::na(), Check::na(), Check::na(), Check::na(), Check::na())
        } else {
            let vmin = vv.iter().cloned().fold(f64::INFINITY, f64::min);
            let vdec = monotone_violation(vv, 0, n - 1, -1.0);
            let vmax = vv.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let s0 = system.spectral(c, Equilibrium::Origin);
            let s3 = system.spectral(c, Equilibrium::Mu3);
            let psi = match (&s0, &s3) {
                (Ok(s0), Ok(s3)) => {
                    let p2 = (0..n).map(|i| uu[i] + s0.eta2 * vv[i]).fold(f64::INFINITY, f64::min);
                    let q2 = (0..n)
                        .map(|i| (uu[i] - system.mu3) + s3.eta2 * (vv[i] - veq))
                        .fold(f64::NEG_INFINITY, f64::max);
                    (Check::new(p2 > -floor, p2, 0.0), Check::new(q2 < floor, q2, 0.0))
                }
                _ => (Check::na(), Check::na()),
            };
            // Translate so that N = 2; the phase crossing moves to log(2/N).
            let nn = seminorm(&u.grid, uu);
            let zeta_beta = (2.0 / nn).ln()
                + crate::wave::front_position(&u.grid, uu, system.phase_level).unwrap_or(f64::NAN);
            let z3 = (2.0 / system.phase_level.powi(2)).ln();
            // Measure of {u > β₁} against 6κβ²/(1−2β) in the units of the
            // normalized cubic.
            let k = -system.cubic.a3;
            let b = system.mid / system.top;
            let bound = 6.0 * kappa / (k * system.top.powi(2)) * b * b / (1.0 - 2.0 * b);
            let meas = u.grid.h * uu.iter().filter(|&&x| x > system.phase_level).count() as f64;
            (
                Check::new(vmin > -floor, vmin, 0.0),
                Check::new(vdec <= floor, vdec, floor),
                Check::new(vmax < veq, vmax, veq),
                psi.0,
                psi.1,
                Check::new(zeta_beta <= z3, zeta_beta, z3),
                Check::new(meas >= bound, meas, bound),
            )
        };
    let kappa_below_delta0 = Check::new(kappa < system.delta0, kappa, system.delta0);
    let speed_bound = Check::new(c <= system.speed_bound(), c, system.speed_bound());
    let lower = -system.truncation.m1;
    let upper = system.truncation.beta2;
    let (lo, hi) = (uu.iter().cloned().fold(f64::INFINITY, f64::min), u_max);
    let margin = (lo - lower).min(upper - hi);
    let constraints_inactive = Check::new(margin > floor, margin, floor);
    let left_to = if pulse { i_lmin } else { i_max };
    let fits = decay_fits(system, kind, c, u, left_to.max(1), i_min.min(n - 2));
    let right_decay = Check::new(fits.right_error() <= 0.02, fits.right_error(), 0.02);
    let left_decay = Check::new(fits.left_error() <= 0.05, fits.left_error(), 0.05);
    ValidationReport {
        landmarks,
        sign_changes,
        max_below_one,
        monotone_segments,
        v_positive,
        v_decreasing,
        v_below_equilibrium,
        psi2_positive,
        big_psi2_negative,
        kappa_below_delta0,
        speed_bound,
        zeta_beta_window,
        measure_bound,
        constraints_inactive,
        right_decay,
        left_decay,
        decay_fits: fits,
    }
}
