//! End-to-end wave solves, reports and the diffusion sweep.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::newton::{refine_bvp, BvpOptions};
use super::speed::{find_speed_from, SpeedCurve, SpeedOptions};
use super::validate::{validate_in_system, DecayFits, ValidationReport};
use crate::error::{Error, Result};
use crate::model::{classify_regime, ModelParams, WaveKind, WaveSystem};
use crate::scalar::analytic_front;
use crate::weighted::{read_pair_csv, write_pair_csv, Functional, NonlocalOperator, Profile};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionStatus {
    Accepted,
    Candidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SolveOptions {
    pub speed: SpeedOptions,
    pub bvp: BvpOptions,
}

/// Scalar part of a solution, serialized as the JSON report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveReport {
    pub kind: WaveKind,
    pub params: ModelParams,
    pub c: f64,
    pub kappa: f64,
    pub j_value: f64,
    pub el_residual: f64,
    /// max |v − 𝓛u| over the tridiagonal and the Green's realizations.
    pub nonlocal_mismatch: f64,
    pub decay_fits: DecayFits,
    pub newton_iterations: usize,
    pub spg_iterations: usize,
    pub speed_curve: SpeedCurve,
    pub validation: ValidationReport,
    pub status: SolutionStatus,
    pub failing_checks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaveSolution {
    pub report: WaveReport,
    /// Profiles in the original variables on the moving-frame axis z.
    pub u: Profile,
    pub v: Profile,
}

/// The system a wave of this kind is computed in.
pub fn wave_system(params: &ModelParams, kind: WaveKind) -> Result<WaveSystem> {
    match kind {
        WaveKind::ReversedFront => WaveSystem::reversed(params),
        _ => WaveSystem::canonical(params),
    }
}

/// (U, V) = (μ₃ − u, μ₃/γ − v), an involution.
pub fn reverse_pair(system: &WaveSystem, u: &Profile, v: &Profile) -> Result<(Profile, Profile)> {
    let ve = system.mu3 / system.gamma;
    Ok((
        Profile::new(u.grid, u.values.iter().map(|x| system.mu3 - x).collect())?,
        Profile::new(v.grid, v.values.iter().map(|x| ve - x).collect())?,
    ))
}

/// Max-norm residual of both traveling-wave equations in the canonical
/// system at interior nodes (u-equation) and all nodes (v-equation).
pub fn el_residual(params: &ModelParams, c: f64, u: &Profile, v: &Profile) -> Result<f64> {
    let sys = WaveSystem::canonical(params)?;
    let op = NonlocalOperator::new(u.grid, c, params.gamma)?;
    let h = u.grid.h;
    let (ep, em) = ((0.5 * h).exp(), (-0.5 * h).exp());
    let kappa = params.d * c * c;
    let (uu, vv) = (&u.values, &v.values);
    let mut r = op.residual(uu, vv).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    for i in 1..uu.len() - 1 {
        let lap = (ep * (uu[i + 1] - uu[i]) - em * (uu[i] - uu[i - 1])) / (h * op.mass_scaled[i]);
        r = r.max((kappa * lap + sys.cubic.eval(uu[i]) - vv[i]).abs());
    }
    Ok(r)
}

/// max |v − 𝓛u| over both realizations of 𝓛.
pub fn nonlocal_mismatch(params: &ModelParams, c: f64, u: &Profile, v: &Profile) -> Result<f64> {
    let op = NonlocalOperator::new(u.grid, c, params.gamma)?;
    let a = op.apply(&u.values)?;
    let g = op.apply_green(&u.values);
    Ok((0..u.len()).map(|i| (v.values[i] - a[i]).abs().max((v.values[i] - g[i]).abs())).fold(0.0, f64::max))
}

/// Profile checks for a solution given in original variables.
pub fn validate_profile(kind: WaveKind, params: &ModelParams, c: f64, u: &Profile, v: &Profile) -> Result<ValidationReport> {
    let sys = wave_system(params, kind)?;
    Ok(if kind == WaveKind::ReversedFront {
        let (uu, vv) = reverse_pair(&sys, u, v)?;
        validate_in_system(&sys, kind, c, &uu, &vv)
    } else {
        validate_in_system(&sys, kind, c, u, v)
    })
}

impl WaveSolution {
    /// Re-runs every check on the stored profiles.
    pub fn revalidate(&self) -> Result<Self> {
        let r = &self.report;
        let validation = validate_profile(r.kind, &r.params, r.c, &self.u, &self.v)?;
        let mut out = self.clone();
        out.report.failing_checks = validation.failures();
        out.report.status = if validation.all_pass() { SolutionStatus::Accepted } else { SolutionStatus::Candidate };
        out.report.decay_fits = validation.decay_fits;
        out.report.validation = validation;
        Ok(out)
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        serde_json::to_writer_pretty(w, &self.report)?;
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        write_pair_csv(&self.u, &self.v, w)
    }

    pub fn read<R1: Read, R2: Read>(json: R1, csv: R2) -> Result<Self> {
        let report: WaveReport = serde_json::from_reader(json)?;
        let (u, v) = read_pair_csv(csv)?;
        Ok(Self { report, u, v })
    }

    /// Writes `wave.json` and `profile.csv` into `dir`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let mut j = std::fs::File::create(dir.join("wave.json"))?;
        self.write_json(&mut j)?;
        j.write_all(b"\n")?;
        self.write_csv(std::fs::File::create(dir.join("profile.csv"))?)
    }

    pub fn load(dir: &Path) -> Result<Self> {
        Self::read(std::fs::File::open(dir.join("wave.json"))?, std::fs::File::open(dir.join("profile.csv"))?)
    }
}

/// find_speed → refine_bvp → validate_profile for one wave kind.
pub fn solve_wave(params: &ModelParams, kind: WaveKind, opts: &SolveOptions) -> Result<WaveSolution> {
    solve_wave_from(params, kind, opts, None)
}

pub fn solve_wave_from(params: &ModelParams, kind: WaveKind, opts: &SolveOptions, init: Option<&[f64]>) -> Result<WaveSolution> {
    let regime = classify_regime(params)?;
    if !regime.admits(kind) {
        return Err(Error::Regime(format!("{kind:?} is not admissible in the {:?} regime", regime.regime)));
    }
    let sys = wave_system(params, kind)?;
    let speed = find_speed_from(&sys, kind, &opts.speed, init)?;
    let bvp = refine_bvp(&sys, kind, speed.c0, &speed.u0, &opts.bvp)?;
    let c = bvp.c;
    let func = Functional::new(bvp.u.grid, c, sys.d * c * c, sys.gamma, sys.cubic)?;
    let j_value = func.normalized(&bvp.u.values)?;
    let (u, v) = if kind == WaveKind::ReversedFront { reverse_pair(&sys, &bvp.u, &bvp.v)? } else { (bvp.u, bvp.v) };
    let validation = validate_profile(kind, params, c, &u, &v)?;
    let failing = validation.failures();
    let report = WaveReport {
        kind,
        params: *params,
        c,
        kappa: params.d * c * c,
        j_value,
        el_residual: el_residual(params, c, &u, &v)?,
        nonlocal_mismatch: nonlocal_mismatch(params, c, &u, &v)?,
        decay_fits: validation.decay_fits,
        newton_iterations: bvp.iterations,
        spg_iterations: speed.spg_iterations,
        speed_curve: speed.curve,
        status: if failing.is_empty() { SolutionStatus::Accepted } else { SolutionStatus::Candidate },
        failing_checks: failing,
        validation,
    };
    Ok(WaveSolution { report, u, v })
}

pub fn solve_front(params: &ModelParams, opts: &SolveOptions) -> Result<WaveSolution> {
    solve_wave(params, WaveKind::Front, opts)
}

pub fn solve_reversed_front(params: &ModelParams, opts: &SolveOptions) -> Result<WaveSolution> {
    solve_wave(params, WaveKind::ReversedFront, opts)
}

pub fn solve_pulse(params: &ModelParams, opts: &SolveOptions) -> Result<WaveSolution> {
    solve_wave(params, WaveKind::Pulse, opts)
}

/// sup over z ∈ [−5, 5] of |u(ζ_β + z) − 𝓗(z)|, with 𝓗 the tanh front of the
/// scalar problem at δ₀ and ζ_β the crossing of β₁.
pub fn distance_to_scalar_front(params: &ModelParams, u: &Profile) -> Result<f64> {
    let (_, front) = analytic_front(params.beta)?;
    let sys = WaveSystem::canonical(params)?;
    let zb = super::speed::front_position(&u.grid, &u.values, sys.phase_level)
        .ok_or_else(|| Error::Degenerate("profile never crosses the phase level".into()))?;
    Ok((0..=1000)
        .map(|k| {
            let z = -5.0 + 0.01 * k as f64;
            (u.interpolate(zb + z) - front.value(z)).abs()
        })
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: f64,
    pub c: Option<f64>,
    pub dc2: Option<f64>,
    pub sup_u: Option<f64>,
    pub v_at_zeta_max: Option<f64>,
    pub scalar_distance: Option<f64>,
    pub status: Option<SolutionStatus>,
    pub error: Option<String>,
}

/// Forward fronts for each d (descending), warm-starting each scan from the
/// previous minimizer. Failures are recorded per row.
pub fn d_sweep(params: &ModelParams, d_list: &[f64], opts: &SolveOptions) -> Result<Vec<SweepRow>> {
    if d_list.len() < 3 {
        return Err(Error::InvalidParams(format!("sweep needs at least 3 values of d, got {}", d_list.len())));
    }
    if d_list.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParams("d values must be strictly descending".into()));
    }
    let mut rows = Vec::new();
    let mut warm: Option<Vec<f64>> = None;
    for &d in d_list {
        let p = params.with_d(d);
        let row = p.validate().and_then(|_| solve_wave_from(&p, WaveKind::Front, opts, warm.as_deref()));
        rows.push(match row {
            Ok(s) => {
                let l = s.report.validation.landmarks;
                let dist = distance_to_scalar_front(&p, &s.u).ok();
                warm = Some(s.u.resample(opts.speed.grid).values);
                SweepRow {
                    d,
                    c: Some(s.report.c),
                    dc2: Some(s.report.kappa),
                    sup_u: Some(l.u_max),
                    v_at_zeta_max: Some(l.v_at_zeta_max),
                    scalar_distance: dist,
                    status: Some(s.report.status),
                    error: None,
                }
            }
            Err(e) => SweepRow {
                d,
                c: None,
                dc2: None,
                sup_u: None,
                v_at_zeta_max: None,
                scalar_distance: None,
                status: None,
                error: Some(e.to_string()),
            },
        });
    }
    Ok(rows)
}

/// Writes `d,c,dc2,sup_u,v_at_zetaM` (empty cells for failed rows).
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], w: W) -> Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(["d", "c", "dc2", "sup_u", "v_at_zetaM"])?;
    let f = |x: Option<f64>| x.map(crate::weighted::fmt_f64).unwrap_or_default();
    for r in rows {
        wr.write_record([crate::weighted::fmt_f64(r.d), f(r.c), f(r.dc2), f(r.sup_u), f(r.v_at_zeta_max)])?;
    }
    wr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weighted::WeightedGrid;

    fn params() -> ModelParams {
        ModelParams::new(0.45, 50.0, 1e-5).unwrap()
    }

    #[test]
    fn reverse_pair_is_an_involution() {
        let sys = wave_system(&params(), WaveKind::ReversedFront).unwrap();
        let g = WeightedGrid::with_spacing(-3.0, 3.0, 0.5).unwrap();
        let u = Profile::from_fn(g, |z| z.sin());
        let v = Profile::from_fn(g, |z| 0.01 * z);
        let (a, b) = reverse_pair(&sys, &u, &v).unwrap();
        let (uu, vv) = reverse_pair(&sys, &a, &b).unwrap();
        for i in 0..g.n {
            assert!((uu.values[i] - u.values[i]).abs() < 1e-15 && (vv.values[i] - v.values[i]).abs() < 1e-15);
        }
        assert!((a.values[g.index_of(0.0)] - sys.mu3).abs() < 1e-15);
    }

    #[test]
    fn sweep_rejects_bad_lists() {
        let o = SolveOptions::default();
        assert!(matches!(d_sweep(&params(), &[1e-5, 5e-6], &o), Err(Error::InvalidParams(_))));
        assert!(matches!(d_sweep(&params(), &[1e-5, 2e-5, 5e-6], &o), Err(Error::InvalidParams(_))));
        assert!(matches!(d_sweep(&params(), &[1e-5, 1e-5, 5e-6], &o), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn sweep_csv_leaves_failed_cells_empty() {
        let rows = vec![
            SweepRow {
                d: 1e-4,
                c: None,
                dc2: None,
                sup_u: None,
                v_at_zeta_max: None,
                scalar_distance: None,
                status: None,
                error: Some("none".into()),
            },
            SweepRow {
                d: 1e-5,
                c: Some(15.5),
                dc2: Some(0.0024),
                sup_u: Some(0.99),
                v_at_zeta_max: Some(0.004),
                scalar_distance: Some(0.1),
                status: Some(SolutionStatus::Accepted),
                error: None,
            },
        ];
        let mut buf = Vec::new();
        write_sweep_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "d,c,dc2,sup_u,v_at_zetaM");
        assert!(lines[1].ends_with(",,,,"));
        let cells: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(cells, vec![1e-5, 15.5, 0.0024, 0.99, 0.004]);
    }

    #[test]
    fn residual_vanishes_on_a_constant_state() {
        let p = params();
        let sys = WaveSystem::canonical(&p).unwrap();
        let g = WeightedGrid::with_spacing(-5.0, 5.0, 0.1).unwrap();
        let u = Profile::from_fn(g, |_| sys.mu3);
        let v = Profile::from_fn(g, |_| sys.mu3 / sys.gamma);
        let r = el_residual(&p, 15.0, &u, &v).unwrap();
        assert!(r < 1e-12, "{r:e}");
    }
}
