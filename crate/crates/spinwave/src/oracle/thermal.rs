//! Gibbs-weighted sums of per-state overlaps.

use num_complex::Complex64;

use super::propagate::Overlaps;
use crate::constants::HBAR;
use crate::{CoherenceSeries, DecayCurve, Error, Result};

/// Canonical ensemble of a 1D oscillator truncated at n_max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    pub beta: f64,
    pub omega: f64,
    pub n_max: usize,
    pub tail_bound: f64,
}

impl ThermalSpec {
    pub fn new(beta: f64, omega: f64, n_max: usize, tail_bound: f64) -> Result<Self> {
        if !(beta > 0.0) || !(omega > 0.0) {
            return Err(Error::invalid("thermal ensemble needs β > 0 and ω > 0"));
        }
        if !(tail_bound > 0.0 && tail_bound < 1.0) {
            return Err(Error::invalid("tail bound must lie in (0, 1)"));
        }
        Ok(ThermalSpec {
            beta,
            omega,
            n_max,
            tail_bound,
        })
    }

    /// Builds from k_BT/ħω, with ω only setting the energy scale.
    pub fn from_ratio(kt_over_hw: f64, omega: f64, n_max: usize, tail_bound: f64) -> Result<Self> {
        if !(kt_over_hw > 0.0) {
            return Err(Error::invalid("k_BT/ħω must be positive"));
        }
        Self::new(1.0 / (kt_over_hw * HBAR * omega), omega, n_max, tail_bound)
    }

    /// Smallest n_max meeting the tail bound.
    pub fn with_minimal_n_max(mut self) -> Self {
        self.n_max = self.required_n_max();
        self
    }

    /// q = e^{−βħω}.
    pub fn q(&self) -> f64 {
        (-self.beta * HBAR * self.omega).exp()
    }

    /// p_n = (1 − q)qⁿ.
    pub fn weight(&self, n: usize) -> f64 {
        let q = self.q();
        (1.0 - q) * q.powi(n as i32)
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..=self.n_max).map(|n| self.weight(n)).collect()
    }

    /// Σ_{n>n_max} p_n = q^{n_max+1}.
    pub fn tail(&self) -> f64 {
        self.q().powi(self.n_max as i32 + 1)
    }

    pub fn required_n_max(&self) -> usize {
        let q = self.q();
        if q == 0.0 {
            return 0;
        }
        ((self.tail_bound.ln() / q.ln()).ceil() as usize).saturating_sub(1)
    }

    pub fn validate(&self) -> Result<()> {
        let tail = self.tail();
        if !(tail < self.tail_bound) {
            let mut need = self.required_n_max();
            while self.q().powi(need as i32 + 1) >= self.tail_bound {
                need += 1;
            }
            return Err(Error::TailBound {
                tail,
                bound: self.tail_bound,
                required_n_max: need,
            });
        }
        Ok(())
    }
}

/// C(t) = Σ w_n Q_n(t), μ(t) = Σ w_n M_n(t). Weights need not be normalized;
/// the ratio |C|²/(μ(0)μ(t)) does not depend on their sum.
pub fn weighted_coherence(overlaps: &[Overlaps], weights: &[f64]) -> Result<CoherenceSeries> {
    let first = overlaps
        .first()
        .ok_or_else(|| Error::invalid("no per-state overlaps supplied"))?;
    if overlaps.len() != weights.len() {
        return Err(Error::invalid("one weight per state is required"));
    }
    if weights.iter().any(|w| !(*w >= 0.0)) {
        return Err(Error::invalid("weights must be >= 0"));
    }
    for o in overlaps {
        if o.times != first.times || o.q.len() != o.times.len() || o.m_t.len() != o.times.len() {
            return Err(Error::invalid("per-state overlaps use different time grids"));
        }
    }
    let nt = first.times.len();
    let mut c = vec![Complex64::new(0.0, 0.0); nt];
    let mut mu_t = vec![0.0; nt];
    let mut mu0 = 0.0;
    for (o, &w) in overlaps.iter().zip(weights) {
        for i in 0..nt {
            c[i] += w * o.q[i];
            mu_t[i] += w * o.m_t[i];
        }
        mu0 += w * o.m0;
    }
    if !(mu0 > 0.0) {
        return Err(Error::Numerical("μ(0) vanishes: the mode misses the ensemble".into()));
    }
    Ok(CoherenceSeries {
        times: first.times.clone(),
        c,
        mu0,
        mu_t,
    })
}

/// Thermal sum over states 0..=n_max with Gibbs weights.
pub fn thermal_efficiency(overlaps: &[Overlaps], spec: &ThermalSpec) -> Result<(DecayCurve, CoherenceSeries)> {
    spec.validate()?;
    if overlaps.len() != spec.n_max + 1 {
        return Err(Error::invalid(format!(
            "{} states supplied, n_max = {} needs {}",
            overlaps.len(),
            spec.n_max,
            spec.n_max + 1
        )));
    }
    let series = weighted_coherence(overlaps, &spec.weights())?;
    Ok((series.to_curve()?, series))
}

/// Single pure state (BEC): η/η₀ = |Q|²/(M(0)M(t)).
pub fn bec_efficiency(overlaps: &Overlaps) -> Result<(DecayCurve, CoherenceSeries)> {
    let series = weighted_coherence(std::slice::from_ref(overlaps), &[1.0])?;
    Ok((series.to_curve()?, series))
}
