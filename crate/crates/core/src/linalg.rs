//! Small dense-free linear algebra: tridiagonal and banded solvers,
//! compensated summation.

use crate::error::{Error, Result};

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator.
pub fn ksum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut k = KahanSum::new();
    for x in it {
        k.add(x);
    }
    k.value()
}

/// Tridiagonal matrix stored by diagonals: `lower[i]` couples row i to
/// column i-1 (`lower[0]` unused), `upper[i]` couples row i to i+1
/// (`upper[n-1]` unused).
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub lower: Vec<f64>,
    pub diag: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Tridiagonal {
    pub fn zeros(n: usize) -> Self {
        Self { lower: vec![0.0; n], diag: vec![0.0; n], upper: vec![0.0; n] }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * x[i];
                if i > 0 {
                    s += self.lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    /// Thomas algorithm. Stable without pivoting for diagonally dominant
    /// or M-matrix systems, which is all this crate builds.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.len();
        let mut cp = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut denom = self.diag[0];
        if denom == 0.0 || !denom.is_finite() {
            return Err(Error::Singular(0));
        }
        cp[0] = if n > 1 { self.upper[0] / denom } else { 0.0 };
        x[0] = rhs[0] / denom;
        for i in 1..n {
            denom = self.diag[i] - self.lower[i] * cp[i - 1];
            if denom == 0.0 || !denom.is_finite() {
                return Err(Error::Singular(i));
            }
            if i + 1 < n {
                cp[i] = self.upper[i] / denom;
            }
            x[i] = (rhs[i] - self.lower[i] * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] -= cp[i] * x[i + 1];
        }
        Ok(x)
    }
}

/// Square banded matrix with `kl` sub- and `ku` super-diagonals, LU
/// factorized with partial pivoting (LAPACK `gbtrf` layout idea, row storage).
#[derive(Debug, Clone)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    // Row i stores columns i-kl ..= i+ku+kl (extra kl for pivoting fill).
    width: usize,
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![0.0; n * width] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn idx(&self, i: usize, j: usize) -> Option<usize> {
        if j + self.kl < i || j > i + self.ku + self.kl {
            return None;
        }
        Some(i * self.width + (j + self.kl - i))
    }

    /// Adds `v` to entry (i, j). Panics if outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        assert!(j + self.kl >= i && j <= i + self.ku, "entry ({i},{j}) outside band");
        let k = self.idx(i, j).unwrap();
        self.data[k] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.idx(i, j).map(|k| self.data[k]).unwrap_or(0.0)
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }

    /// Solves `A x = b` in place of a copy of the matrix.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        let mut a = self.data.clone();
        let w = self.width;
        let kl = self.kl;
        let at = |i: usize, j: usize| i * w + (j + kl - i);
        let mut x = b.to_vec();
        let ubw = self.ku + self.kl;
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut pmax = a[at(k, k)].abs();
            for i in k + 1..=last {
                let v = a[at(i, k)].abs();
                if v > pmax {
                    pmax = v;
                    p = i;
                }
            }
            if pmax == 0.0 || !pmax.is_finite() {
                return Err(Error::Singular(k));
            }
            let jmax = (k + ubw).min(n - 1);
            if p != k {
                for j in k..=jmax {
                    a.swap(at(k, j), at(p, j));
                }
                x.swap(k, p);
            }
            let piv = a[at(k, k)];
            for i in k + 1..=last {
                let l = a[at(i, k)] / piv;
                if l == 0.0 {
                    continue;
                }
                a[at(i, k)] = 0.0;
                for j in k + 1..=jmax {
                    a[at(i, j)] -= l * a[at(k, j)];
                }
                x[i] -= l * x[k];
            }
        }
        for k in (0..n).rev() {
            let jmax = (k + ubw).min(n - 1);
            let mut s = x[k];
            for j in k + 1..=jmax {
                s -= a[at(k, j)] * x[j];
            }
            x[k] = s / a[at(k, k)];
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_recovers_small_terms() {
        let mut v = vec![1e16];
        v.extend(std::iter::repeat(1.0).take(1000));
        v.push(-1e16);
        assert_eq!(ksum(v), 1000.0);
    }

    #[test]
    fn thomas_matches_matvec() {
        let n = 50;
        let mut t = Tridiagonal::zeros(n);
        for i in 0..n {
            t.diag[i] = 4.0 + (i as f64).sin();
            t.lower[i] = -1.0;
            t.upper[i] = -1.3;
        }
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).cos()).collect();
        let b = t.matvec(&x);
        let y = t.solve(&b).unwrap();
        for i in 0..n {
            assert!((x[i] - y[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn band_solve_needs_pivoting() {
        // zero on the diagonal forces a row swap
        let n = 30;
        let mut a = BandMatrix::new(n, 2, 3);
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 3).min(n - 1) {
                let v = if i == j && i % 3 == 0 { 0.0 } else { ((i * 7 + j * 3) % 11) as f64 - 4.5 };
                a.add(i, j, v);
            }
        }
        let x: Vec<f64> = (0..n).map(|i| 1.0 + i as f64 * 0.1).collect();
        let b = a.matvec(&x);
        let y = a.solve(&b).unwrap();
        for i in 0..n {
            assert!((x[i] - y[i]).abs() < 1e-9, "{i}: {} vs {}", x[i], y[i]);
        }
    }
}
