//! Bracketed scalar root finding.

use crate::error::{Error, Result};

/// Default absolute tolerance on the bracket width.
pub const ROOT_TOL: f64 = 1e-13;

/// Bisection on `[lo, hi]` for a sign change of `g`.
///
/// Stops when the bracket is narrower than `tol` (absolute, plus a few ulps
/// of the endpoints) or when `g` vanishes exactly.
pub fn bisect<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, tol: f64, what: &str) -> Result<f64> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut ga = g(a);
    let gb = g(b);
    if ga == 0.0 {
        return Ok(a);
    }
    if gb == 0.0 {
        return Ok(b);
    }
    if !(ga.is_finite() && gb.is_finite()) || ga.signum() == gb.signum() {
        return Err(Error::RootBracket { what: what.to_string(), lo: a, hi: b });
    }
    for _ in 0..400 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b || (b - a) <= tol + 4.0 * f64::EPSILON * m.abs() {
            return Ok(m);
        }
        let gm = g(m);
        if gm == 0.0 {
            return Ok(m);
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Bisection on a boolean predicate that is false at `lo` and true at `hi`.
/// Returns the smallest point where it turns true, to width `tol`.
pub fn bisect_predicate<P: Fn(f64) -> bool>(p: P, lo: f64, hi: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (lo, hi);
    while b - a > tol {
        let m = 0.5 * (a + b);
        if p(m) {
            b = m;
        } else {
            a = m;
        }
    }
    b
}

/// Illinois-modified regula falsi on a sign-changing bracket. Returns the
/// root once `|g| <= ftol` or the bracket shrinks below `xtol`, together
/// with the last residual.
pub fn illinois<G: FnMut(f64) -> Result<f64>>(
    mut g: G,
    lo: f64,
    g_lo: f64,
    hi: f64,
    g_hi: f64,
    xtol: f64,
    ftol: f64,
    max_iter: usize,
) -> Result<(f64, f64)> {
    let (mut a, mut fa, mut b, mut fb) = (lo, g_lo, hi, g_hi);
    if fa.signum() == fb.signum() {
        return Err(Error::RootBracket { what: "regula falsi".into(), lo, hi });
    }
    let mut side = 0i8;
    let mut best = if fa.abs() < fb.abs() { (a, fa) } else { (b, fb) };
    for _ in 0..max_iter {
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a.min(b) && x < a.max(b)) {
            x = 0.5 * (a + b);
        }
        let fx = g(x)?;
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx.abs() <= ftol || (b - a).abs() <= xtol {
            return Ok((x, fx));
        }
        if fx.signum() == fb.signum() {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    Ok(best)
}
