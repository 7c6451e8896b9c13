//! Exact thermal coherence for a 1D oscillator suddenly moved from frequency
//! ω_g to ω_r, with R = 1:
//! C(t) = C₀(1−q) Σ_{n,n'} qⁿ e^{it(ω_g n − ω_r n')} |⟨φ_{a_g,n}|φ_{a_r,n'}⟩|².

use num_complex::Complex64;

use super::grid::{hermite_functions, hermite_requirements, Grid1D};
use super::thermal::ThermalSpec;
use crate::constants::HBAR;
use crate::models::{Kuhr, KuhrVariant, Warning};
use crate::{CoherenceSeries, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapMethod {
    /// Grid quadrature of products of eigenfunctions.
    GridOverlap,
    /// Second order in Δa = a_r − a_g; only n' = n, n ± 2 survive.
    Perturbative,
}

/// Default bound on the discarded Gibbs weight.
pub const DEFAULT_TAIL: f64 = 1e-6;
const COMPLETENESS: f64 = 1e-10;

/// Banded squared-overlap matrix: `rows[n]` holds (n', P_{nn'}).
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapMatrix {
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl OverlapMatrix {
    pub fn get(&self, n: usize, n2: usize) -> f64 {
        self.rows
            .get(n)
            .and_then(|r| r.iter().find(|(m, _)| *m == n2).map(|(_, p)| *p))
            .unwrap_or(0.0)
    }
}

/// Squared overlaps to second order in Δa/a_g.
pub fn perturbative_overlaps(n_max: usize, length_ratio: f64) -> Result<OverlapMatrix> {
    let da = length_ratio - 1.0;
    if !(da.abs() < 0.3) {
        return Err(Error::invalid(format!(
            "|Δa|/a_g = {:.3} is too large for the perturbative overlaps (limit 0.3)",
            da.abs()
        )));
    }
    let eps = da * da / 4.0;
    let rows = (0..=n_max)
        .map(|n| {
            let nf = n as f64;
            let mut row = Vec::with_capacity(3);
            if n >= 2 {
                row.push((n - 2, eps * nf * (nf - 1.0)));
            }
            row.push((n, 1.0 - 2.0 * eps * (nf * nf + nf + 1.0)));
            row.push((n + 2, eps * (nf + 1.0) * (nf + 2.0)));
            row
        })
        .collect();
    Ok(OverlapMatrix { rows })
}

/// Squared overlaps by quadrature, widening the band until every row sums to
/// one within 10⁻¹⁰.
pub fn grid_overlaps(n_max: usize, length_ratio: f64) -> Result<OverlapMatrix> {
    if !(length_ratio > 0.0) || !length_ratio.is_finite() {
        return Err(Error::invalid("oscillator length ratio must be positive"));
    }
    let mut band = 8usize;
    loop {
        let top = n_max + band;
        let (hg, kg) = hermite_requirements(n_max, 1.0);
        let (hr, kr) = hermite_requirements(top, length_ratio);
        let grid = Grid1D::covering(hg.max(hr), kg.max(kr))?;
        let xs = grid.xs();
        let fg = hermite_functions(n_max, 1.0, 0.0, &xs);
        let fr = hermite_functions(top, length_ratio, 0.0, &xs);
        let mut rows = Vec::with_capacity(n_max + 1);
        let mut worst: f64 = 0.0;
        for (n, g) in fg.iter().enumerate() {
            let lo = n.saturating_sub(band);
            let mut row = Vec::new();
            let mut total = 0.0;
            for n2 in (lo..=n + band).filter(|m| (m + n) % 2 == 0) {
                let amp: f64 = g.iter().zip(&fr[n2]).map(|(a, b)| a * b).sum::<f64>() * grid.dx;
                let p = amp * amp;
                total += p;
                row.push((n2, p));
            }
            worst = worst.max((1.0 - total).abs());
            rows.push(row);
        }
        if worst < COMPLETENESS {
            return Ok(OverlapMatrix { rows });
        }
        if band >= 512 {
            return Err(Error::Numerical(format!(
                "overlap rows sum to 1 − {worst:.1e} even with band {band}"
            )));
        }
        band *= 2;
    }
}

/// Result of the exact sum with its validity notes.
#[derive(Debug, Clone, PartialEq)]
pub struct KuhrExact {
    pub series: CoherenceSeries,
    pub warnings: Vec<Warning>,
}

pub fn kuhr_exact(
    beta: f64,
    omega_g: f64,
    omega_r: f64,
    n_max: usize,
    times: &[f64],
    method: OverlapMethod,
) -> Result<KuhrExact> {
    let spec = ThermalSpec::new(beta, omega_g, n_max, DEFAULT_TAIL)?;
    kuhr_exact_spec(&spec, omega_r, times, method)
}

pub fn kuhr_exact_spec(spec: &ThermalSpec, omega_r: f64, times: &[f64], method: OverlapMethod) -> Result<KuhrExact> {
    if !(omega_r > 0.0) || !omega_r.is_finite() {
        return Err(Error::invalid("ω_r must be positive"));
    }
    spec.validate()?;
    let omega_g = spec.omega;
    let ratio = (omega_g / omega_r).sqrt();
    let p = match method {
        OverlapMethod::GridOverlap => grid_overlaps(spec.n_max, ratio)?,
        OverlapMethod::Perturbative => perturbative_overlaps(spec.n_max, ratio)?,
    };
    let weights = spec.weights();
    let c = times
        .iter()
        .map(|&t| {
            let mut sum = Complex64::new(0.0, 0.0);
            for (n, row) in p.rows.iter().enumerate() {
                let mut inner = Complex64::new(0.0, 0.0);
                for &(n2, pv) in row {
                    inner += pv * Complex64::from_polar(1.0, t * (omega_g * n as f64 - omega_r * n2 as f64));
                }
                sum += weights[n] * inner;
            }
            sum * Complex64::from_polar(1.0, 0.5 * t * (omega_g - omega_r))
        })
        .collect();
    let mu0: f64 = weights.iter().sum();
    // unit mass: only ω enters
    let kuhr = Kuhr::new(
        spec.beta,
        omega_g * omega_g,
        omega_r * omega_r,
        1.0,
        1,
        KuhrVariant::KuhrIntermediate,
    )?;
    Ok(KuhrExact {
        series: CoherenceSeries::normalized(times.to_vec(), c, mu0),
        warnings: kuhr.window_warnings(),
    })
}

/// K = βħω_g/(ω_g − ω_r).
pub fn k_time(beta: f64, omega_g: f64, omega_r: f64) -> f64 {
    beta * HBAR * omega_g / (omega_g - omega_r).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_traps_give_identity() {
        let p = grid_overlaps(30, 1.0).unwrap();
        for n in 0..=30 {
            for &(m, v) in &p.rows[n] {
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-10, "{n} {m} {v}");
            }
        }
        let omega = 1e3;
        let beta = 0.1 / (HBAR * omega);
        let r = kuhr_exact(beta, omega, omega, 200, &[0.0, 0.1, 3.0], OverlapMethod::GridOverlap).unwrap();
        for e in r.series.eta_ratio() {
            assert!((e - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn parity_selection() {
        let p = grid_overlaps(20, 1.15).unwrap();
        for n in 0..=20 {
            for &(m, v) in &p.rows[n] {
                if (m + n) % 2 == 1 {
                    assert_eq!(v, 0.0);
                }
            }
        }
        // odd n' are never even listed; check directly by quadrature
        let g = Grid1D::covering(40.0, 40.0).unwrap();
        let a = hermite_functions(3, 1.0, 0.0, &g.xs());
        let b = hermite_functions(4, 1.15, 0.0, &g.xs());
        let odd: f64 = a[3].iter().zip(&b[4]).map(|(x, y)| x * y).sum::<f64>() * g.dx;
        assert!(odd.abs() < 1e-14);
    }

    #[test]
    fn perturbative_matches_quadrature() {
        let ratio = 1.0 + 1e-3;
        let exact = grid_overlaps(10, ratio).unwrap();
        let pert = perturbative_overlaps(10, ratio).unwrap();
        let da2 = 1e-6;
        for n in 0usize..=10 {
            for m in [n.saturating_sub(2), n, n + 2] {
                let d = (exact.get(n, m) - pert.get(n, m)).abs();
                // third order in Δa
                assert!(d < 100.0 * da2 * 1e-3 * (n as f64 + 1.0).powi(3), "{n} {m} {d}");
            }
        }
    }
}
