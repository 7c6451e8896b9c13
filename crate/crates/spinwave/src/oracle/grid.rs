//! Uniform periodic grid, wavefunctions on it, and harmonic-oscillator
//! eigenstates.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::{Error, Result};

/// Points x_j = x_min + j·dx, j = 0..points, with periodic wrap at x_max.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
    pub dx: f64,
    pub dk: f64,
}

impl Grid1D {
    pub fn new(x_min: f64, x_max: f64, points: usize) -> Result<Self> {
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::invalid("grid needs x_max > x_min"));
        }
        if points < 256 || !points.is_power_of_two() {
            return Err(Error::invalid(format!(
                "grid size {points} must be a power of two >= 256"
            )));
        }
        let dx = (x_max - x_min) / points as f64;
        Ok(Grid1D {
            x_min,
            x_max,
            points,
            dx,
            dk: 2.0 * PI / (points as f64 * dx),
        })
    }

    /// Symmetric grid [−half, half).
    pub fn centered(half_extent: f64, points: usize) -> Result<Self> {
        Self::new(-half_extent, half_extent, points)
    }

    /// Smallest power-of-two grid with half-extent ≥ `half_extent` and
    /// Nyquist wave number ≥ `k_max`.
    pub fn covering(half_extent: f64, k_max: f64) -> Result<Self> {
        if !(half_extent > 0.0) || !(k_max > 0.0) {
            return Err(Error::invalid("grid extent and bandwidth must be positive"));
        }
        let dx_max = PI / k_max;
        let needed = (2.0 * half_extent / dx_max).ceil() as usize;
        if needed > 1 << 24 {
            return Err(Error::invalid(format!("grid of {needed} points is too large")));
        }
        Self::centered(half_extent, needed.next_power_of_two().max(256))
    }

    /// L, the quantization length.
    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.dx
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.points).map(|j| self.x(j)).collect()
    }

    /// Wave numbers in FFT order.
    pub fn ks(&self) -> Vec<f64> {
        let n = self.points as i64;
        (0..n)
            .map(|j| if j < n / 2 { j } else { j - n } as f64 * self.dk)
            .collect()
    }

    pub fn k_nyquist(&self) -> f64 {
        PI / self.dx
    }

    pub fn half_extent(&self) -> f64 {
        (-self.x_min).min(self.x_max)
    }
}

/// Complex wavefunction sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub grid: Grid1D,
    pub psi: Vec<Complex64>,
}

impl GridState {
    pub fn new(grid: Grid1D, psi: Vec<Complex64>) -> Result<Self> {
        if psi.len() != grid.points {
            return Err(Error::invalid("wavefunction length differs from grid size"));
        }
        Ok(GridState { grid, psi })
    }

    /// e^{ikx}/√L. `k` should be a multiple of dk for periodicity.
    pub fn plane_wave(grid: &Grid1D, k: f64) -> Self {
        let amp = 1.0 / grid.length().sqrt();
        let psi = grid
            .xs()
            .into_iter()
            .map(|x| Complex64::from_polar(amp, k * x))
            .collect();
        GridState {
            grid: grid.clone(),
            psi,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(|c| c.norm_sqr()).sum::<f64>() * self.grid.dx
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &GridState) -> Complex64 {
        self.psi
            .iter()
            .zip(&other.psi)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            * self.grid.dx
    }
}

/// Half-extent and wave number needed to hold oscillator state n of length a₀
/// centered at the origin: the classical turning point plus 6a₀ in both
/// position and wave number.
pub fn hermite_requirements(n: usize, a0: f64) -> (f64, f64) {
    let tp = (2.0 * n as f64 + 1.0).sqrt() + 6.0;
    (a0 * tp, tp / a0)
}

fn check_grid(n: usize, a0: f64, center: f64, grid: &Grid1D) -> Result<()> {
    let (half, kmax) = hermite_requirements(n, a0);
    let have_half = (center - grid.x_min).min(grid.x_max - center);
    if have_half < half || grid.k_nyquist() < kmax {
        return Err(Error::GridTooSmall {
            required_half_extent: half,
            required_dx: PI / kmax,
            half_extent: have_half,
            dx: grid.dx,
        });
    }
    Ok(())
}

/// Real oscillator eigenfunctions φ_0..φ_{n_max} of length a₀ centered at
/// `center`, sampled at `xs`.
///
/// Uses the three-term recurrence on normalized functions
/// φ_k = √(2/k) ξ φ_{k−1} − √((k−1)/k) φ_{k−2}, carrying the Gaussian factor
/// as a separate log-scale so that large n neither overflows nor underflows.
pub fn hermite_functions(n_max: usize, a0: f64, center: f64, xs: &[f64]) -> Vec<Vec<f64>> {
    let mut out = vec![vec![0.0; xs.len()]; n_max + 1];
    let log_norm = -0.25 * PI.ln() - 0.5 * a0.ln();
    for (j, &x) in xs.iter().enumerate() {
        let xi = (x - center) / a0;
        let mut log_scale = log_norm - 0.5 * xi * xi;
        let mut prev = 0.0;
        let mut cur = 1.0;
        out[0][j] = log_scale.exp();
        for k in 1..=n_max {
            let kf = k as f64;
            let next = (2.0 / kf).sqrt() * xi * cur - ((kf - 1.0) / kf).sqrt() * prev;
            prev = cur;
            cur = next;
            if cur.abs() > 1e150 {
                prev *= 1e-150;
                cur *= 1e-150;
                log_scale += 150.0 * std::f64::consts::LN_10;
            }
            out[k][j] = if cur == 0.0 { 0.0 } else { cur * log_scale.exp() };
        }
    }
    out
}

/// Normalized oscillator eigenstate n on `grid`.
pub fn hermite_state(n: usize, a0: f64, grid: &Grid1D) -> Result<GridState> {
    hermite_state_at(n, a0, 0.0, grid)
}

pub fn hermite_state_at(n: usize, a0: f64, center: f64, grid: &Grid1D) -> Result<GridState> {
    if !(a0 > 0.0) {
        return Err(Error::invalid("oscillator length must be positive"));
    }
    check_grid(n, a0, center, grid)?;
    let f = hermite_functions(n, a0, center, &grid.xs());
    let psi = f[n].iter().map(|&v| Complex64::new(v, 0.0)).collect();
    Ok(GridState {
        grid: grid.clone(),
        psi,
    })
}

/// All eigenstates 0..=n_max in one pass.
pub fn hermite_states(n_max: usize, a0: f64, grid: &Grid1D) -> Result<Vec<GridState>> {
    if !(a0 > 0.0) {
        return Err(Error::invalid("oscillator length must be positive"));
    }
    check_grid(n_max, a0, 0.0, grid)?;
    Ok(hermite_functions(n_max, a0, 0.0, &grid.xs())
        .into_iter()
        .map(|f| GridState {
            grid: grid.clone(),
            psi: f.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_invariants() {
        assert!(Grid1D::new(0.0, 1.0, 100).is_err());
        assert!(Grid1D::new(0.0, 1.0, 128).is_err());
        let g = Grid1D::new(-1.0, 3.0, 512).unwrap();
        assert!((g.dk - 2.0 * PI / (g.points as f64 * g.dx)).abs() < 1e-15);
        assert_eq!(g.ks()[256], -g.k_nyquist());
    }

    #[test]
    fn ground_state() {
        let a0 = 1.1e-6;
        let g = Grid1D::covering(10.0 * a0, 10.0 / a0).unwrap();
        let s = hermite_state(0, a0, &g).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-10);
        // rms width a₀/√2
        let var: f64 = s
            .psi
            .iter()
            .zip(g.xs())
            .map(|(p, x)| p.norm_sqr() * x * x)
            .sum::<f64>()
            * g.dx;
        assert!((var.sqrt() / (a0 / 2f64.sqrt()) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn orthonormal_to_forty() {
        let a0 = 1.0;
        let (h, k) = hermite_requirements(40, a0);
        let g = Grid1D::covering(h, k).unwrap();
        let states = hermite_states(40, a0, &g).unwrap();
        for m in 0..=40 {
            for n in m..=40 {
                let v = states[m].inner(&states[n]);
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((v.re - want).abs() < 1e-8 && v.im.abs() < 1e-12, "{m} {n} {v}");
            }
        }
    }

    #[test]
    fn n40_norm() {
        let a0 = 1.1e-6;
        let (h, k) = hermite_requirements(40, a0);
        let g = Grid1D::covering(h, k).unwrap();
        let s = hermite_state(40, a0, &g).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn large_n_has_no_overflow() {
        let (h, k) = hermite_requirements(600, 1.0);
        let g = Grid1D::covering(h, k).unwrap();
        let s = hermite_state(600, 1.0, &g).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-8, "{}", s.norm_sqr());
    }

    #[test]
    fn small_grid_is_rejected() {
        let g = Grid1D::centered(5.0, 256).unwrap();
        match hermite_state(40, 1.0, &g) {
            Err(Error::GridTooSmall {
                required_half_extent, ..
            }) => assert!(required_half_extent > 5.0),
            other => panic!("{other:?}"),
        }
    }
}
