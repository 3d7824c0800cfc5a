//! Level-set tracking and speed fits.

use serde::{Deserialize, Serialize};

use super::SimGrid;
use crate::error::{Error, Result};

/// All downward crossings of `level` (u ≥ level left of the crossing),
/// linearly interpolated, in increasing y.
pub fn crossings(grid: &SimGrid, u: &[f64], level: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..u.len() - 1 {
        let (a, b) = (u[i] - level, u[i + 1] - level);
        if (a >= 0.0 && b < 0.0) || (a < 0.0 && b >= 0.0) {
            out.push(grid.y(i) + a / (a - b) * grid.h);
        }
    }
    out
}

/// Rightmost crossing of `level`.
pub fn rightmost_crossing(grid: &SimGrid, u: &[f64], level: f64) -> Option<f64> {
    crossings(grid, u, level).last().copied()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedFit {
    pub sigma: f64,
    pub intercept: f64,
    /// Root-mean-square deviation of the track from the fitted line.
    pub residual: f64,
}

/// Least-squares slope of y*(τ) over the final half of the track.
pub fn measure_speed(track: &[(f64, f64)]) -> Result<SpeedFit> {
    if track.len() < 20 {
        return Err(Error::InvalidParams(format!("speed fit needs at least 20 points, got {}", track.len())));
    }
    let pts = &track[track.len() / 2..];
    let m = pts.len() as f64;
    let tm = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let ym = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let stt: f64 = pts.iter().map(|p| (p.0 - tm).powi(2)).sum();
    let sty: f64 = pts.iter().map(|p| (p.0 - tm) * (p.1 - ym)).sum();
    let sigma = sty / stt;
    let intercept = ym - sigma * tm;
    let residual = (pts.iter().map(|p| (p.1 - intercept - sigma * p.0).powi(2)).sum::<f64>() / m).sqrt();
    Ok(SpeedFit { sigma, intercept, residual })
}
