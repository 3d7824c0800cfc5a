//! Weighted projection onto the sign-class admissible sets, each a union of
//! boxes indexed by the crossing nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdmissibleKind {
    /// class +/− with w − μ₃ also +/−
    Front,
    /// class −/+/−
    Pulse,
    /// class +/−
    SingleSignChange,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissibleSpec {
    pub kind: AdmissibleKind,
    pub lower: f64,
    pub upper: f64,
    pub mu3: f64,
}

impl AdmissibleSpec {
    pub fn new(kind: AdmissibleKind, lower: f64, upper: f64, mu3: f64) -> Result<Self> {
        let ok = match kind {
            AdmissibleKind::Front => lower < 0.0 && 0.0 < mu3 && mu3 < upper,
            _ => lower < 0.0 && 0.0 < upper,
        };
        if !ok {
            return Err(Error::InvalidParams(format!(
                "admissible bounds lower={lower}, mu3={mu3}, upper={upper} out of order"
            )));
        }
        Ok(Self { kind, lower, upper, mu3 })
    }

    /// The boxes used left of the first split, between the splits and right
    /// of the second split.
    pub fn boxes(&self) -> [(f64, f64); 3] {
        let neg = (self.lower, 0.0);
        let pos = (0.0, self.upper);
        match self.kind {
            AdmissibleKind::Front => [(self.mu3, self.upper), (0.0, self.mu3), neg],
            AdmissibleKind::Pulse => [neg, pos, neg],
            AdmissibleKind::SingleSignChange => [pos, pos, neg],
        }
    }

    /// Whether `u` lies in the set (with splits chosen freely).
    pub fn contains(&self, u: &[f64]) -> bool {
        let w = vec![1.0; u.len()];
        let (_, _, cost) = best_splits(u, &w, self);
        cost == 0.0
    }
}

#[inline]
fn clamp_cost(x: f64, (lo, hi): (f64, f64)) -> f64 {
    let y = x.clamp(lo, hi);
    (x - y) * (x - y)
}

/// Optimal split pair (k1 ≤ k2) and its weighted cost:
/// nodes i < k1 use box 0, k1 ≤ i < k2 box 1, i ≥ k2 box 2.
/// Ties resolve to the smallest k2, then the smallest k1.
pub fn best_splits(u: &[f64], weights: &[f64], spec: &AdmissibleSpec) -> (usize, usize, f64) {
    let n = u.len();
    let b = spec.boxes();
    let cost = |i: usize, k: usize| weights[i] * clamp_cost(u[i], b[k]);
    // P0(k), P1(k): prefix sums over i < k; S2(k): suffix sum over i ≥ k.
    let mut p0 = vec![0.0; n + 1];
    let mut p1 = vec![0.0; n + 1];
    for i in 0..n {
        p0[i + 1] = p0[i] + cost(i, 0);
        p1[i + 1] = p1[i] + cost(i, 1);
    }
    let mut s2 = vec![0.0; n + 1];
    for i in (0..n).rev() {
        s2[i] = s2[i + 1] + cost(i, 2);
    }
    let mut best = (0, 0, f64::INFINITY);
    let mut run = (0usize, f64::INFINITY);
    for k2 in 0..=n {
        let cand = p0[k2] - p1[k2];
        if cand < run.1 {
            run = (k2, cand);
        }
        let total = run.1 + p1[k2] + s2[k2];
        if total < best.2 {
            best = (run.0, k2, total);
        }
    }
    // recompute the winning cost directly to avoid prefix-sum cancellation
    let direct: f64 = (0..n)
        .map(|i| {
            let k = if i < best.0 {
                0
            } else if i < best.1 {
                1
            } else {
                2
            };
            cost(i, k)
        })
        .sum();
    (best.0, best.1, direct)
}

/// Applies the clamps for a given split pair.
pub fn apply_splits(u: &[f64], spec: &AdmissibleSpec, k1: usize, k2: usize) -> Vec<f64> {
    let b = spec.boxes();
    u.iter()
        .enumerate()
        .map(|(i, &x)| {
            let k = if i < k1 {
                0
            } else if i < k2 {
                1
            } else {
                2
            };
            x.clamp(b[k].0, b[k].1)
        })
        .collect()
}

/// Projection of `u` onto the admissible set in the norm Σ w_i x_i².
pub fn project_admissible(u: &[f64], weights: &[f64], spec: &AdmissibleSpec) -> Vec<f64> {
    let (k1, k2, _) = best_splits(u, weights, spec);
    apply_splits(u, spec, k1, k2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn front() -> AdmissibleSpec {
        AdmissibleSpec::new(AdmissibleKind::Front, -0.05, 1.01, 0.96).unwrap()
    }

    #[test]
    fn admissible_unchanged() {
        let u: Vec<f64> = (0..50).map(|i| 1.0 - i as f64 / 45.0).map(|x: f64| x.max(-0.04)).collect();
        let w: Vec<f64> = (0..50).map(|i| (i as f64 * 0.1).exp()).collect();
        assert_eq!(project_admissible(&u, &w, &front()), u);
    }

    #[test]
    fn pulse_positive_is_upper_clamped() {
        let spec = AdmissibleSpec::new(AdmissibleKind::Pulse, -0.05, 1.01, 0.96).unwrap();
        let u = vec![0.1, 0.5, 1.2, 0.7, 0.2];
        let p = project_admissible(&u, &[1.0; 5], &spec);
        assert_eq!(p, vec![0.1, 0.5, 1.01, 0.7, 0.2]);
    }

    #[test]
    fn idempotent_and_nonexpansive() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for kind in [AdmissibleKind::Front, AdmissibleKind::Pulse, AdmissibleKind::SingleSignChange] {
            let spec = AdmissibleSpec::new(kind, -0.05, 1.01, 0.96).unwrap();
            for _ in 0..50 {
                let n = 40;
                let w: Vec<f64> = (0..n).map(|i| (0.2 * i as f64).exp()).collect();
                let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..1.5)).collect();
                let pa = project_admissible(&a, &w, &spec);
                assert_eq!(project_admissible(&pa, &w, &spec), pa);
                assert!(spec.contains(&pa));
                // distance to the projection is no larger than to any admissible point
                let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..1.5)).collect();
                let pb = project_admissible(&b, &w, &spec);
                let d = |x: &[f64], y: &[f64]| -> f64 {
                    x.iter().zip(y).zip(&w).map(|((p, q), ww)| ww * (p - q) * (p - q)).sum()
                };
                assert!(d(&a, &pa) <= d(&a, &pb) * (1.0 + 1e-12));
            }
        }
    }
}
