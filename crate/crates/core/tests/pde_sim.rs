use fhn_core::model::{ModelParams, WaveSystem};
use fhn_core::sim::{self, init_state, rightmost_crossing, InitKind, Outcome, SimConfig, SimGrid, SimKind, Stepper};
use fhn_core::wave::{self, SolveOptions};

fn params() -> ModelParams {
    ModelParams::new(0.45, 50.0, 1e-5).unwrap()
}

/// Short runs on a small domain: enough to compare discretizations, not to
/// reach the asymptotic speed.
fn small(params: ModelParams, n: usize, dtau: f64) -> SimConfig {
    SimConfig {
        n,
        domain_widths: 80.0,
        dtau,
        tau_max: 5000.0,
        min_displacement_widths: 4.0,
        settle_times: 0.25,
        ..SimConfig::new(params)
    }
}

#[test]
fn speed_is_converged_under_refinement() {
    let coarse = small(params(), 2048, 0.2);
    let fine = SimConfig { n: 4096, dtau: 0.1, ..coarse };
    let (a, _) = sim::run_single(SimKind::Front, &coarse, None).unwrap();
    let (b, _) = sim::run_single(SimKind::Front, &fine, None).unwrap();
    assert_eq!(a.outcome, Outcome::FrontRight);
    assert_eq!(b.outcome, Outcome::FrontRight);
    let rel = ((a.sigma_measured - b.sigma_measured) / b.sigma_measured).abs();
    assert!(rel < 0.01, "{} vs {} ({:.3}%)", a.sigma_measured, b.sigma_measured, 100.0 * rel);
}

#[test]
fn traveling_wave_is_preserved_in_the_moving_frame() {
    let p = params();
    let s = wave::solve_front(&p, &SolveOptions::default()).unwrap();
    let sys = WaveSystem::canonical(&p).unwrap();
    let sigma = s.report.kappa.sqrt();
    let level = 0.5 * sys.mu3;
    let zg = s.u.grid;
    let zu = s.u.values.clone();
    let z_half = (0..zu.len() - 1)
        .rev()
        .find(|&i| zu[i] >= level && zu[i + 1] < level)
        .map(|i| zg.z(i) + zg.h * (zu[i] - level) / (zu[i] - zu[i + 1]))
        .unwrap();
    let grid = SimGrid::new(-200.0, 400.0, 4096).unwrap();
    let at = |y: f64, y_c: f64| z_half + sigma * (y - y_c);
    let u0: Vec<f64> = (0..grid.n).map(|i| s.u.interpolate(at(grid.y(i), 0.0))).collect();
    let v0: Vec<f64> = (0..grid.n).map(|i| s.v.interpolate(at(grid.y(i), 0.0))).collect();
    let mut st = init_state(&InitKind::Custom { u: u0, v: v0 }, &p, grid).unwrap();
    let y_start = rightmost_crossing(&grid, &st.u, level).unwrap();
    let mut stepper = Stepper::new(&st, 0.1).unwrap();
    for _ in 0..2000 {
        stepper.step(&mut st).unwrap();
    }
    let y_end = rightmost_crossing(&grid, &st.u, level).unwrap();
    let speed = (y_end - y_start) / st.tau;
    assert!(((speed - sigma) / sigma).abs() < 0.02, "moved at {speed}, wave speed {sigma}");
    // Profile against the wave, away from the truncated far tail on the left.
    let mut worst = 0.0f64;
    for i in 0..grid.n {
        let y = grid.y(i);
        if y > -100.0 {
            worst = worst.max((st.u[i] - s.u.interpolate(at(y, y_end))).abs());
        }
    }
    assert!(worst < 0.02 * sys.mu3, "sup deviation {worst}");
}

#[test]
fn supercritical_front_advances() {
    let p = ModelParams::new(0.45, 70.0, 1e-5).unwrap();
    let (r, _) = sim::run_single(SimKind::Front, &small(p, 2048, 0.2), None).unwrap();
    assert_eq!(r.outcome, Outcome::FrontRight, "{r:?}");
    assert!(r.sigma_measured > 0.0);
}

#[test]
fn excited_plateau_becomes_a_pulse() {
    // The back only locks on once v behind the plateau has relaxed.
    let cfg = SimConfig { domain_widths: 200.0, settle_times: 2.0, ..small(params(), 8192, 0.1) };
    let (r, s) = sim::run_single(SimKind::Pulse, &cfg, None).unwrap();
    assert_eq!(r.outcome, Outcome::Pulse, "{:?} sigma {}", r.outcome, r.sigma_measured);
    assert!(r.sigma_measured > 0.0);
    let (ul, ur) = (s.u[0], s.u[s.u.len() - 1]);
    assert!(ul.abs() < 0.05 && ur.abs() < 0.05, "{ul} {ur}");
}

#[test]
fn both_orientations_run_from_one_call() {
    let cfg = small(params(), 2048, 0.2);
    let reports = sim::run_experiment(SimKind::Both, &cfg, |_| None).unwrap();
    assert_eq!(reports.len(), 2);
    assert_eq!(reports[0].kind, SimKind::Front);
    assert_eq!(reports[1].kind, SimKind::Reversed);
    assert!(sim::bidirectional(&reports), "{:?}", reports.iter().map(|r| r.outcome).collect::<Vec<_>>());
}
