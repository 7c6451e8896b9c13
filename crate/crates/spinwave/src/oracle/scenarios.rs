//! Ready-made oracle configurations, one per closed-form model, and the
//! comparison report between an oracle and its closed form.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::{hermite_requirements, hermite_states, Grid1D, GridState};
use super::propagate::{Overlaps, PropagationOptions, Potential, Propagator, StorageOperator};
use super::thermal::{thermal_efficiency, weighted_coherence, ThermalSpec};
use crate::constants::HBAR;
use crate::models::{check_times, DecayCurve};
use crate::{CoherenceSeries, Error, Result};

/// Grid holding states of half-extent `x_half` and bandwidth `k_max` for a
/// free flight of duration `t_max`: the extent grows by the distance covered
/// at the largest occupied velocity.
pub fn flight_grid(x_half: f64, k_max: f64, t_max: f64, mass: f64) -> Result<Grid1D> {
    let travel = HBAR * k_max * t_max / mass;
    Grid1D::covering(x_half + travel, k_max)
}

/// Oracle curve against a closed form on the same times.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub label: String,
    pub times: Vec<f64>,
    pub oracle: Vec<f64>,
    pub model: Vec<f64>,
    /// Points with a model value below this are left out of the statistics.
    pub floor: f64,
    pub max_rel_dev: f64,
    pub mean_rel_dev: f64,
}

impl Comparison {
    pub fn new(label: &str, times: Vec<f64>, oracle: Vec<f64>, model: Vec<f64>, floor: f64) -> Result<Self> {
        if oracle.len() != times.len() || model.len() != times.len() {
            return Err(Error::invalid("comparison series differ in length"));
        }
        let devs: Vec<f64> = oracle
            .iter()
            .zip(&model)
            .filter(|(_, m)| **m >= floor)
            .map(|(o, m)| ((o - m) / m).abs())
            .collect();
        if devs.is_empty() {
            return Err(Error::invalid("no model values above the comparison floor"));
        }
        let max_rel_dev = devs.iter().cloned().fold(0.0, f64::max);
        let mean_rel_dev = devs.iter().sum::<f64>() / devs.len() as f64;
        Ok(Comparison {
            label: label.to_string(),
            times,
            oracle,
            model,
            floor,
            max_rel_dev,
            mean_rel_dev,
        })
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_rel_dev <= tolerance
    }
}

fn check_oracle_times(times: &[f64]) -> Result<f64> {
    check_times(times)?;
    match (times.first(), times.last()) {
        (Some(&t0), Some(&t1)) if t0 >= 0.0 => Ok(t1),
        (Some(_), _) => Err(Error::invalid("oracle times must be >= 0")),
        _ => Err(Error::invalid("no times requested")),
    }
}

/// Thermal plane waves of velocity spread σ_v along k_R, free Hamiltonians,
/// plane-wave storage operator.
///
/// The box is a multiple of λ_R, fine enough in k that the Gaussian momentum
/// sum is exact, and long enough that the first recurrence L/v_R lies beyond
/// twenty times the last requested time.
pub fn recoil_oracle(k_r: f64, sigma_v: f64, mass: f64, times: &[f64]) -> Result<CoherenceSeries> {
    let t_max = check_oracle_times(times)?;
    if !(sigma_v >= 0.0) || !(mass > 0.0) || !k_r.is_finite() {
        return Err(Error::invalid("recoil oracle needs σ_v >= 0, m > 0, finite k_R"));
    }
    let sigma_k = mass * sigma_v / HBAR;
    let v_r = HBAR * k_r.abs() / mass;
    let mut length: f64 = 0.0;
    if sigma_k > 0.0 {
        length = length.max(2.0 * PI / (sigma_k / 10.0));
    }
    if v_r > 0.0 {
        length = length.max(20.0 * v_r * t_max.max(1e-12));
        let lambda = 2.0 * PI / k_r.abs();
        length = ((length / lambda).ceil().max(1.0)) * lambda;
    }
    if length == 0.0 {
        length = 1e-6;
    }
    let k_cut = 8.0 * sigma_k;
    let k_max = k_cut + k_r.abs();
    let needed = (1.25 * length * k_max / PI).ceil() as usize;
    let grid = Grid1D::new(-0.5 * length, 0.5 * length, needed.next_power_of_two().max(256))?;
    let prop = Propagator::new(grid.clone(), mass, PropagationOptions::default())?;
    let r = StorageOperator::plane_wave(k_r);
    let n_cut = (k_cut / grid.dk).floor() as i64;
    let states: Vec<i64> = (-n_cut..=n_cut).collect();
    let per_state = states
        .par_iter()
        .map(|&j| {
            let s = GridState::plane_wave(&grid, j as f64 * grid.dk);
            prop.overlaps(&s, &r, &Potential::Zero, &Potential::Zero, times)
        })
        .collect::<Result<Vec<Overlaps>>>()?;
    let weights: Vec<f64> = states
        .iter()
        .map(|&j| {
            if sigma_k == 0.0 {
                1.0
            } else {
                let k = j as f64 * grid.dk;
                (-k * k / (2.0 * sigma_k * sigma_k)).exp()
            }
        })
        .collect();
    weighted_coherence(&per_state, &weights)
}

/// Per-state overlaps for oscillator states 0..=n_max released at t = 0
/// into free space, with a Gaussian mode of waist w and recoil k_R.
pub fn release_overlaps(n_max: usize, a0: f64, w: f64, k_r: f64, mass: f64, times: &[f64]) -> Result<Vec<Overlaps>> {
    let t_max = check_oracle_times(times)?;
    if !(a0 > 0.0) || !(w > 0.0) || !(mass > 0.0) {
        return Err(Error::invalid("release oracle needs a₀, w, m > 0"));
    }
    let (x_half, k_state) = hermite_requirements(n_max, a0);
    let k_max = k_state + 8.0 / w + k_r.abs();
    let grid = flight_grid(x_half.max(6.0 * w), k_max, t_max, mass)?;
    let prop = Propagator::new(grid.clone(), mass, PropagationOptions::default())?;
    let r = StorageOperator::gaussian(k_r, w);
    hermite_states(n_max, a0, &grid)?
        .par_iter()
        .map(|s| prop.overlaps(s, &r, &Potential::Zero, &Potential::Zero, times))
        .collect()
}

/// Condensate in the ground state of length a₀, released at storage.
pub fn release_bec_oracle(a0: f64, w: f64, mass: f64, times: &[f64]) -> Result<CoherenceSeries> {
    let o = release_overlaps(0, a0, w, 0.0, mass, times)?;
    weighted_coherence(&o, &[1.0])
}

/// Thermal 1D ensemble released at storage, from grid propagation.
pub fn release_thermal_oracle(
    spec: &ThermalSpec,
    a0: f64,
    w: f64,
    mass: f64,
    times: &[f64],
) -> Result<(DecayCurve, CoherenceSeries)> {
    spec.validate()?;
    let o = release_overlaps(spec.n_max, a0, w, 0.0, mass, times)?;
    thermal_efficiency(&o, spec)
}

/// σ_v = 0 homogeneous gas in a Gaussian mode with a uniform force F on the
/// Rydberg state along x. Returns (η_x, η_y); the 2D result is their product.
pub fn linear_force_oracle(w: f64, mass: f64, force: f64, times: &[f64]) -> Result<(CoherenceSeries, CoherenceSeries)> {
    let t_max = check_oracle_times(times)?;
    if !(w > 0.0) || !(mass > 0.0) || !force.is_finite() {
        return Err(Error::invalid("linear-force oracle needs w, m > 0 and finite F"));
    }
    let run = |f: f64| -> Result<CoherenceSeries> {
        let k_max = 10.0 / w + f.abs() * t_max / HBAR;
        let drift = 0.5 * f.abs() / mass * t_max * t_max;
        let grid = flight_grid(8.0 * w + drift, k_max, t_max, mass)?;
        let prop = Propagator::new(grid.clone(), mass, PropagationOptions::default())?;
        let s = GridState::plane_wave(&grid, 0.0);
        let vr = if f == 0.0 { Potential::Zero } else { Potential::linear(f) };
        let o = prop.overlaps(&s, &StorageOperator::gaussian(0.0, w), &Potential::Zero, &vr, times)?;
        weighted_coherence(&[o], &[1.0])
    };
    Ok((run(force)?, run(0.0)?))
}

/// Parameters of the in-trap sag scenario: both states harmonic, the Rydberg
/// trap of stiffness κ_r with a differential force F along x (gravity), beam
/// centered on the cloud.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SagScenario {
    pub mass: f64,
    pub omega: f64,
    pub kappa_ratio: f64,
    pub force: f64,
    pub waist: f64,
    pub temperature: f64,
    pub tail_bound: f64,
}

/// Thermal sum over oscillator states in x and in y; the x direction feels
/// the force. Returns (η_x, η_y).
pub fn harmonic_sag_oracle(sc: &SagScenario, times: &[f64]) -> Result<(DecayCurve, DecayCurve)> {
    let t_max = check_oracle_times(times)?;
    if !(sc.mass > 0.0) || !(sc.omega > 0.0) || !(sc.waist > 0.0) || !(sc.temperature > 0.0) {
        return Err(Error::invalid("sag oracle needs m, ω, w, T > 0"));
    }
    let beta = 1.0 / (crate::constants::K_B * sc.temperature);
    let spec = ThermalSpec::new(beta, sc.omega, 0, sc.tail_bound)?.with_minimal_n_max();
    let kappa_g = sc.mass * sc.omega * sc.omega;
    let kappa_r = sc.kappa_ratio * kappa_g;
    let a0 = (HBAR / (sc.mass * sc.omega)).sqrt();
    let run = |f: f64| -> Result<DecayCurve> {
        let (x_half, k_state) = hermite_requirements(spec.n_max, a0);
        let k_max = k_state + 8.0 / sc.waist + f.abs() * t_max / HBAR;
        let grid = flight_grid(x_half.max(6.0 * sc.waist), k_max, t_max, sc.mass)?;
        let prop = Propagator::new(grid.clone(), sc.mass, PropagationOptions::default())?;
        let vg = Potential::harmonic(kappa_g, 0.0);
        let vr = Potential::Polynomial {
            c0: 0.0,
            c1: -f,
            c2: 0.5 * kappa_r,
        };
        let r = StorageOperator::gaussian(0.0, sc.waist);
        let o = hermite_states(spec.n_max, a0, &grid)?
            .par_iter()
            .map(|s| prop.overlaps(s, &r, &vg, &vr, times))
            .collect::<Result<Vec<_>>>()?;
        Ok(thermal_efficiency(&o, &spec)?.0)
    };
    Ok((run(sc.force)?, run(0.0)?))
}

/// Truncation of the thermal sum in the release comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReleaseTruncation {
    /// n ≤ 40, evaluated in closed form. Any discarded weight below one half
    /// is accepted.
    N40,
    /// Discarded Gibbs weight below 10⁻⁵, evaluated on the grid.
    Converged,
}

/// Number of states kept by [`ReleaseTruncation::N40`].
pub const TRUNCATED_N_MAX: usize = 40;

/// Thermal release from a 1D harmonic trap (⁸⁷Rb, ω/2π = 96 Hz) at the given
/// k_BT/ħω and w/a₀, oracle against the high-temperature approximation on
/// `points` + 1 times spanning [0, 2w/σ_v].
pub fn release_thermal_comparison(
    kt_over_hw: f64,
    w_over_a0: f64,
    truncation: ReleaseTruncation,
    points: usize,
) -> Result<Comparison> {
    if !(w_over_a0 > 0.0) || points == 0 {
        return Err(Error::invalid("comparison needs w/a₀ > 0 and at least one interval"));
    }
    let mass = crate::constants::M_RB87;
    let omega = 2.0 * PI * 96.0;
    let a0 = crate::physics::oscillator_length(mass, omega);
    let w = w_over_a0 * a0;
    let spec = match truncation {
        ReleaseTruncation::N40 => ThermalSpec::from_ratio(kt_over_hw, omega, TRUNCATED_N_MAX, 0.5)?,
        ReleaseTruncation::Converged => ThermalSpec::from_ratio(kt_over_hw, omega, 0, 1e-5)?.with_minimal_n_max(),
    };
    let sigma_v = kt_over_hw.sqrt() * a0 * omega;
    let sigma_x = sigma_v / omega;
    let t_max = 2.0 * w / sigma_v;
    let times: Vec<f64> = (0..=points).map(|i| i as f64 * t_max / points as f64).collect();
    let oracle = match truncation {
        ReleaseTruncation::N40 => super::closed_form::hermite_release_thermal(&spec, &times, a0, w, mass)?.0,
        ReleaseTruncation::Converged => release_thermal_oracle(&spec, a0, w, mass, &times)?.0,
    };
    let model = times
        .iter()
        .map(|&t| crate::models::eta_release_thermal(t, sigma_x, sigma_v, w, mass, crate::models::ReleaseDims::One))
        .collect();
    let label = format!("release k_BT/ħω={kt_over_hw} w/a0={w_over_a0} n_max={}", spec.n_max);
    Comparison::new(&label, times, oracle.eta, model, 0.0)
}

/// Pointwise product of curves on one time grid.
pub fn product(a: &DecayCurve, b: &DecayCurve) -> Result<DecayCurve> {
    crate::models::compose(&[a.clone(), b.clone()], &crate::models::Composition::CartesianProduct)
}

/// Raw C(t) rows for export: (t, Re C, Im C, μ0, μt, η).
pub fn series_rows(s: &CoherenceSeries) -> Vec<[f64; 6]> {
    let eta = s.eta_ratio();
    s.times
        .iter()
        .zip(&s.c)
        .zip(&s.mu_t)
        .zip(eta)
        .map(|(((t, c), mu), e): (((&f64, &Complex64), &f64), f64)| [*t, c.re, c.im, s.mu0, *mu, e])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::M_RB87;
    use crate::models::{eta_recoil, eta_release_bec, recoil_time};

    #[test]
    fn recoil_is_reproduced() {
        let m = M_RB87;
        let sigma_v = crate::physics::thermal_velocity(2e-6, m);
        let k_r = 2.0 * PI / 1.25e-6;
        let tau = recoil_time(k_r, sigma_v).finite().unwrap();
        let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.1 * tau).collect();
        let s = recoil_oracle(k_r, sigma_v, m, &times).unwrap();
        for (t, e) in times.iter().zip(s.eta_ratio()) {
            let want = eta_recoil(*t, k_r, sigma_v);
            assert!((e - want).abs() <= 1e-3 * want, "t={t}: {e} vs {want}");
        }
    }

    #[test]
    fn bec_release_is_reproduced() {
        let m = M_RB87;
        let omega = 2.0 * PI * 96.0;
        let a0 = (HBAR / (m * omega)).sqrt();
        let w = 2.0 * a0;
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 2e-3).collect();
        let s = release_bec_oracle(a0, w, m, &times).unwrap();
        for (t, e) in times.iter().zip(s.eta_ratio()) {
            let want = eta_release_bec(*t, a0, w, omega);
            assert!((e / want - 1.0).abs() < 1e-3, "t={t}: {e} vs {want}");
        }
    }

    #[test]
    fn comparison_floor() {
        let c = Comparison::new("x", vec![0.0, 1.0], vec![1.0, 0.001], vec![1.0, 0.002], 0.01).unwrap();
        assert_eq!(c.max_rel_dev, 0.0);
    }
}
