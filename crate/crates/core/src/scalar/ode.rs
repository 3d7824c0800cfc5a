//! Dormand-Prince 5(4) integrator for small autonomous systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Adaptive Dormand-Prince integrator with mixed absolute/relative tolerance.
#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, h_max: 0.1, max_steps: 1_000_000 }
    }
}

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for (a, k) in terms {
        for i in 0..N {
            out[i] += h * a * k[i];
        }
    }
    out
}

impl Dopri5 {
    pub fn with_tol(tol: f64) -> Self {
        Self { rtol: tol, atol: tol * 1e-2, ..Self::default() }
    }

    /// One explicit step of size `h`; returns the 5th-order solution and
    /// the embedded error estimate.
    pub fn step<const N: usize, F>(f: &F, x: f64, y: &[f64; N], h: f64) -> ([f64; N], [f64; N])
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let k1 = f(x, y);
        let k2 = f(x + C2 * h, &axpy(y, &[(A21, &k1)], h));
        let k3 = f(x + C3 * h, &axpy(y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(x + C4 * h, &axpy(y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = f(x + C5 * h, &axpy(y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
        let k6 = f(x + h, &axpy(y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
        let y5 = axpy(y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], h);
        let k7 = f(x + h, &y5);
        let mut err = [0.0; N];
        for i in 0..N {
            err[i] = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        }
        (y5, err)
    }

    fn error_norm<const N: usize>(&self, y: &[f64; N], y1: &[f64; N], err: &[f64; N]) -> f64 {
        let mut s = 0.0;
        for i in 0..N {
            let sc = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
            s += (err[i] / sc).powi(2);
        }
        (s / N as f64).sqrt()
    }

    /// Integrate from `x0` to `x1` (either direction). `h0` is the initial
    /// step guess; the last accepted step size is returned for reuse.
    pub fn integrate<const N: usize, F>(&self, f: &F, x0: f64, y0: [f64; N], x1: f64, h0: f64) -> Result<([f64; N], f64)>
    where
        F: Fn(f64, &[f64; N]) -> [f64; N],
    {
        let dir = if x1 >= x0 { 1.0 } else { -1.0 };
        let mut x = x0;
        let mut y = y0;
        let mut h = h0.abs().min(self.h_max).max(1e-12);
        let mut steps = 0;
        while dir * (x1 - x) > 1e-15 * (1.0 + x1.abs()) {
            if steps >= self.max_steps {
                return Err(Error::NonConvergence { iterations: steps, measure: x });
            }
            steps += 1;
            let last = h >= dir * (x1 - x);
            let hs = if last { x1 - x } else { dir * h };
            let (y1, err) = Self::step(f, x, &y, hs);
            if y1.iter().any(|v| !v.is_finite()) {
                h *= 0.25;
                if h < 1e-14 {
                    return Err(Error::NonConvergence { iterations: steps, measure: x });
                }
                continue;
            }
            let en = self.error_norm(&y, &y1, &err);
            let fac = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
            if en <= 1.0 {
                x = if last { x1 } else { x + hs };
                y = y1;
                if !last {
                    h = (h * fac).min(self.h_max);
                }
            } else {
                h *= fac.min(1.0);
                if h < 1e-14 {
                    return Err(Error::NonConvergence { iterations: steps, measure: x });
                }
            }
        }
        Ok((y, h))
    }
}
