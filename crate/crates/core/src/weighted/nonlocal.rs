//! The nonlocal operator v = 𝓛_c u, solution of c²v'' + c²v' + u − γv = 0.
//!
//! Discretization: Galerkin with exponentially fitted basis functions (local
//! homogeneous solutions spanned by e^{r₁t}, e^{r₂t} on each cell) and the
//! right-hand side lumped onto the nodes with masses m_i = ∫e^z ψ_i. The
//! scheme is nodally exact for point-mass data, so it coincides with the
//! Green's-kernel evaluation below up to roundoff. Beyond the window u is
//! continued by its end values and the tails are eliminated exactly, which
//! yields the decay (Robin) conditions v' = r₂(v − u₀/γ) on the left and
//! v' = r₁(v − u_R/γ) on the right.

use super::grid::WeightedGrid;
use super::profile::Profile;
use crate::error::{Error, Result};
use crate::linalg::{KahanSum, Tridiagonal};
use crate::model::exponent_pair;

/// ∫₀^h e^{a t} dt
fn eint(a: f64, h: f64) -> f64 {
    if (a * h).abs() < 1e-12 {
        h * (1.0 + 0.5 * a * h)
    } else {
        (a * h).exp_m1() / a
    }
}

/// Assembled operator for fixed (grid, c, γ). Rows are scaled by e^{-z_i},
/// so all stored coefficients are O(1) whatever the window.
#[derive(Debug, Clone)]
pub struct NonlocalOperator {
    pub grid: WeightedGrid,
    pub c: f64,
    pub gamma: f64,
    pub r1: f64,
    pub r2: f64,
    /// Row-scaled stiffness e^{-z_i} K.
    pub stiffness: Tridiagonal,
    /// e^{-z_i} μ_i, including tail masses at the two ends.
    pub mass_scaled: Vec<f64>,
    /// e^{-z_i} m_i without tails.
    pub point_mass_scaled: Vec<f64>,
}

impl NonlocalOperator {
    pub fn new(grid: WeightedGrid, c: f64, gamma: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::InvalidParams(format!("speed c = {c} must be positive")));
        }
        if !(gamma > 0.0) {
            return Err(Error::InvalidParams(format!("gamma = {gamma} must be positive")));
        }
        let (r1, r2) = exponent_pair(gamma, c);
        let h = grid.h;
        let n = grid.n;
        let c2 = c * c;
        // D = e^{r₂h} − e^{r₁h}
        let dd = (r1 * h).exp() * ((r2 - r1) * h).exp_m1();
        let e1 = (r1 * h).exp();
        let e2 = (r2 * h).exp();
        let a_ll = -c2 * (r1 * e2 - r2 * e1) / dd;
        let a_rr = c2 * h.exp() * (r2 * e2 - r1 * e1) / dd;
        let a_lr = c2 * (r1 - r2) / dd;
        let i1 = eint(1.0 + r1, h);
        let i2 = eint(1.0 + r2, h);
        let m_l = (e2 * i1 - e1 * i2) / dd;
        let m_r = (i2 - i1) / dd;
        let emh = (-h).exp();

        let mut k = Tridiagonal::zeros(n);
        let mut pm = vec![0.0; n];
        for i in 0..n {
            if i + 1 < n {
                k.diag[i] += a_ll;
                k.upper[i] = a_lr;
                pm[i] += m_l;
            }
            if i > 0 {
                k.diag[i] += a_rr * emh;
                k.lower[i] = a_lr * emh;
                pm[i] += m_r * emh;
            }
        }
        k.diag[0] += c2 * r2;
        k.diag[n - 1] += -c2 * r1;
        let mut mass = pm.clone();
        mass[0] += 1.0 / (1.0 + r2);
        mass[n - 1] += 1.0 / r2;
        Ok(Self { grid, c, gamma, r1, r2, stiffness: k, mass_scaled: mass, point_mass_scaled: pm })
    }

    /// Operator weights μ_i = ∫e^z ψ_i (tails included).
    pub fn mu(&self) -> Vec<f64> {
        (0..self.grid.n).map(|i| self.mass_scaled[i] * self.grid.weight(i)).collect()
    }

    /// v = 𝓛_c u by one tridiagonal solve.
    pub fn apply(&self, u: &[f64]) -> Result<Vec<f64>> {
        let rhs: Vec<f64> = u.iter().zip(&self.mass_scaled).map(|(a, m)| a * m).collect();
        self.stiffness.solve(&rhs)
    }

    /// Residual rows e^{-z_i}(K v − M u) / (e^{-z_i} μ_i): the discrete form
    /// of −(c²v'' + c²v' + u − γv).
    pub fn residual(&self, u: &[f64], v: &[f64]) -> Vec<f64> {
        let kv = self.stiffness.matvec(v);
        (0..u.len()).map(|i| kv[i] / self.mass_scaled[i] - u[i]).collect()
    }

    /// Green's-kernel evaluation of the same operator:
    /// v_i = [Σ_{j≤i} e^{r₁(z_i−z_j)} e^{−z_j} m_j u_j + Σ_{j>i} e^{r₂(z_i−z_j)} e^{−z_j} m_j u_j
    ///        + tails] / (c²(r₂−r₁)).
    pub fn apply_green(&self, u: &[f64]) -> Vec<f64> {
        let n = self.grid.n;
        let h = self.grid.h;
        let (r1, r2) = (self.r1, self.r2);
        let q: Vec<f64> = u.iter().zip(&self.point_mass_scaled).map(|(a, m)| a * m).collect();
        let f1 = (r1 * h).exp();
        let f2 = (-r2 * h).exp();
        let mut fwd = vec![0.0; n];
        let mut acc = 0.0;
        for i in 0..n {
            acc = acc * f1 + q[i];
            fwd[i] = acc;
        }
        let mut bwd = vec![0.0; n];
        acc = 0.0;
        for i in (0..n - 1).rev() {
            acc = (acc + q[i + 1]) * f2;
            bwd[i] = acc;
        }
        let norm = self.c * self.c * (r2 - r1);
        let (u0, ur) = (u[0], u[n - 1]);
        let zr = self.grid.z(n - 1);
        (0..n)
            .map(|i| {
                let z = self.grid.z(i);
                let tail_l = u0 * (r1 * (z - self.grid.z_left)).exp() / (-r1);
                let tail_r = ur * (r2 * (z - zr)).exp() / r2;
                (fwd[i] + bwd[i] + tail_l + tail_r) / norm
            })
            .collect()
    }

    /// ⟨a, b⟩ = Σ μ_i a_i b_i with compensated summation.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut s = KahanSum::new();
        for i in 0..a.len() {
            s.add(self.mass_scaled[i] * self.grid.weight(i) * a[i] * b[i]);
        }
        s.value()
    }

    /// ∫e^z (c² v_h'² + γ v_h²) over the line for the fitted interpolant of
    /// v, computed cell by cell from closed-form exponential integrals. The
    /// tails are continued by the decaying modes, which is exact for data
    /// vanishing beyond the window.
    pub fn energy_integral(&self, v: &[f64]) -> f64 {
        let g = &self.grid;
        let h = g.h;
        let (r1, r2) = (self.r1, self.r2);
        let c2 = self.c * self.c;
        let mut s = KahanSum::new();
        for k in 0..g.n - 1 {
            // v_h(t) = α e^{r₁t} + β e^{r₂t} with v_h(0) = v_k, v_h(h) = v_{k+1}
            let e1 = (r1 * h).exp();
            let e2 = (r2 * h).exp();
            let det = e2 - e1;
            let alpha = (v[k] * e2 - v[k + 1]) / det;
            let beta = (v[k + 1] - v[k] * e1) / det;
            let coef = [(alpha, r1), (beta, r2)];
            let mut cell = 0.0;
            for &(ca, ra) in &coef {
                for &(cb, rb) in &coef {
                    cell += ca * cb * (c2 * ra * rb + self.gamma) * eint(1.0 + ra + rb, h);
                }
            }
            s.add(g.weight(k) * cell);
        }
        let n = g.n;
        s.add(c2 * r2 * g.weight(0) * v[0] * v[0]);
        s.add(-c2 * r1 * g.weight(n - 1) * v[n - 1] * v[n - 1]);
        s.value()
    }
}

/// v = 𝓛_c u by the tridiagonal realization.
pub fn apply_nonlocal(u: &Profile, c: f64, gamma: f64) -> Result<Profile> {
    let op = NonlocalOperator::new(u.grid, c, gamma)?;
    Profile::new(u.grid, op.apply(&u.values)?)
}

/// v = 𝓛_c u by the Green's-kernel realization.
pub fn apply_nonlocal_green(u: &Profile, c: f64, gamma: f64) -> Result<Profile> {
    let op = NonlocalOperator::new(u.grid, c, gamma)?;
    Profile::new(u.grid, op.apply_green(&u.values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_bump(rng: &mut ChaCha8Rng, g: &WeightedGrid) -> Vec<f64> {
        let k = rng.gen_range(1..4);
        let terms: Vec<(f64, f64, f64)> = (0..k)
            .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-8.0..8.0), rng.gen_range(0.3..3.0)))
            .collect();
        (0..g.n)
            .map(|i| {
                let z = g.z(i);
                terms.iter().map(|&(a, m, s)| a * (-((z - m) / s).powi(2)).exp()).sum()
            })
            .collect()
    }

    #[test]
    fn constant_rule() {
        let g = WeightedGrid::new(-20.0, 20.0, 801).unwrap();
        for &(c, gamma) in &[(0.5, 1.0), (2.0, 50.0), (20.0, 50.0), (0.5, 50.0)] {
            let op = NonlocalOperator::new(g, c, gamma).unwrap();
            let v = op.apply(&vec![1.0; g.n]).unwrap();
            for x in &v {
                assert!((x - 1.0 / gamma).abs() < 1e-12, "c={c} gamma={gamma} v={x}");
            }
            // row sums of K equal γ μ
            let kv = op.stiffness.matvec(&vec![1.0; g.n]);
            for i in 0..g.n {
                assert!((kv[i] - gamma * op.mass_scaled[i]).abs() < 1e-10 * kv[i].abs().max(1.0));
            }
        }
    }

    #[test]
    fn zero_maps_to_zero() {
        let g = WeightedGrid::default_window();
        let v = apply_nonlocal(&Profile::zeros(g), 3.0, 50.0).unwrap();
        assert!(v.values.iter().all(|x| *x == 0.0));
        let v = apply_nonlocal_green(&Profile::zeros(g), 3.0, 50.0).unwrap();
        assert!(v.values.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn gaussian_oracle() {
        let g = WeightedGrid::default_window();
        let u = Profile::from_fn(g, |z| (-z * z).exp());
        let a = apply_nonlocal(&u, 1.0, 1.0).unwrap();
        let b = apply_nonlocal_green(&u, 1.0, 1.0).unwrap();
        let d = a.values.iter().zip(&b.values).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
        assert!(d < 1e-8, "{d}");
    }

    #[test]
    fn hat_of_unit_mass() {
        // unit point mass at 0: v(0) = 1/(c√(c²+4γ))
        let g = WeightedGrid::new(-10.0, 10.0, 20001).unwrap();
        let op = NonlocalOperator::new(g, 1.0, 1.0).unwrap();
        let k0 = g.index_of(0.0);
        let mut u = vec![0.0; g.n];
        // ∫e^z u ≈ μ_k0 u_k0 = 1 with e^{z}=1 at 0
        u[k0] = 1.0 / op.mass_scaled[k0];
        let v = op.apply(&u).unwrap();
        let exact = 1.0 / 5f64.sqrt();
        assert!((v[k0] - exact).abs() < 1e-3 * exact, "{} vs {exact}", v[k0]);
    }

    #[test]
    fn symmetric_positive_and_energy_identity() {
        let g = WeightedGrid::default_window();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(c, gamma) in &[(0.5, 1.0), (2.0, 50.0), (20.0, 50.0)] {
            let op = NonlocalOperator::new(g, c, gamma).unwrap();
            for _ in 0..5 {
                let u = random_bump(&mut rng, &g);
                let w = random_bump(&mut rng, &g);
                let lu = op.apply(&u).unwrap();
                let lw = op.apply(&w).unwrap();
                let a = op.inner(&u, &lw);
                let b = op.inner(&w, &lu);
                assert!((a - b).abs() <= 1e-10 * (a.abs() + b.abs()).max(1e-300) + 1e-16, "{a} {b}");
                assert!(op.inner(&u, &lu) >= 0.0);
                let e = op.energy_integral(&lu);
                let p = op.inner(&u, &lu);
                assert!((e - p).abs() <= 1e-8 * p.abs(), "{e} {p}");
            }
        }
    }
}
