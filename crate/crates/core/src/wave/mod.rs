//! Traveling-wave pipeline: constrained minimization, speed selection,
//! Newton refinement and validation.

mod minimize;
mod newton;
mod solution;
mod speed;
mod validate;

pub use minimize::{energy_change, projected_gradient_norm, spg_minimize, SpgOptions, SpgOutcome};
pub use speed::{
    admissible_spec, find_speed, find_speed_from, polish, front_position, initial_guess, recenter, SpeedCurve, SpeedOptions, SpeedResult,
};
pub use newton::{bvp_grid, left_slow_rate, left_state, refine_bvp, transfer_profile, BvpOptions, BvpSolution, BvpSystem, Mode, PTC_STEPS};
pub use solution::{
    d_sweep, distance_to_scalar_front, el_residual, nonlocal_mismatch, reverse_pair, solve_front, solve_pulse,
    solve_reversed_front, solve_wave, solve_wave_from, validate_profile, wave_system, write_sweep_csv, SolutionStatus,
    SolveOptions, SweepRow, WaveReport, WaveSolution,
};
pub use validate::{
    count_sign_changes, decay_fits, log_slope, validate_in_system, Check, CheckStatus, DecayFits, Landmarks,
    ValidationReport, NOISE_FLOOR,
};
