use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on a window `[z_left, z_right]` of the moving-frame axis with
/// weights e^z. Weights are produced on demand from the node coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedGrid {
    pub z_left: f64,
    pub z_right: f64,
    pub n: usize,
    pub h: f64,
}

impl WeightedGrid {
    pub fn new(z_left: f64, z_right: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidParams(format!("grid needs n >= 3, got {n}")));
        }
        if !(z_left.is_finite() && z_right.is_finite() && z_left < z_right) {
            return Err(Error::InvalidParams(format!("bad window [{z_left}, {z_right}]")));
        }
        Ok(Self { z_left, z_right, n, h: (z_right - z_left) / (n - 1) as f64 })
    }

    /// Grid with spacing close to `h` whose nodes include z = 0.
    pub fn with_spacing(z_left: f64, z_right: f64, h: f64) -> Result<Self> {
        let kl = (-z_left / h).round().max(1.0) as usize;
        let kr = (z_right / h).round().max(1.0) as usize;
        let zl = -(kl as f64) * h;
        Self::new(zl, kr as f64 * h, kl + kr + 1).map(|mut g| {
            g.h = h;
            g
        })
    }

    /// The default moving-frame window [-30, 30] with 6001 nodes.
    pub fn default_window() -> Self {
        Self::new(-30.0, 30.0, 6001).expect("valid")
    }

    #[inline]
    pub fn z(&self, i: usize) -> f64 {
        self.z_left + i as f64 * self.h
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.z(i)).collect()
    }

    #[inline]
    pub fn weight(&self, i: usize) -> f64 {
        self.z(i).exp()
    }

    /// Index of the node closest to `z` (clamped).
    pub fn index_of(&self, z: f64) -> usize {
        let k = ((z - self.z_left) / self.h).round();
        k.clamp(0.0, (self.n - 1) as f64) as usize
    }

    /// Trapezoid weights h·e^{z_i}, halved at the ends.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let w = self.h * self.weight(i);
                if i == 0 || i + 1 == self.n {
                    0.5 * w
                } else {
                    w
                }
            })
            .collect()
    }

    /// The same grid shifted by `a`; weights become e^{z+a}.
    pub fn shifted(&self, a: f64) -> Self {
        Self { z_left: self.z_left + a, z_right: self.z_right + a, ..*self }
    }
}
