//! Closed-form decay models η(t)/η₀ and the containers they produce.
//!
//! Each mechanism lives in its own submodule as plain functions; the
//! [`ScenarioModel`] type bundles a mechanism with its parameters and η₀ so a
//! scenario can be evaluated on a time grid in one call.

pub mod compose;
pub mod harmonic;
pub mod kuhr;
pub mod linear_force;
pub mod raman_nath;
pub mod recoil;
pub mod release;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result};

pub use compose::{compose, Composition};
pub use harmonic::{eta_harmonic_sag, harmonic_trap_timescales, RamanNathBounds};
pub use kuhr::{eta_kuhr, Kuhr, KuhrVariant};
pub use linear_force::{LinearForce, LinearForceForm};
pub use raman_nath::RamanNathGeneral;
pub use recoil::{eta_recoil, recoil_time};
pub use release::{eta_release_bec, eta_release_thermal, ReleaseDims};

/// A decay time that may be infinite. Infinite times never enter formulas as
/// floating-point infinities; they short-circuit to "no decay".
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Timescale {
    Finite(f64),
    NoDecay,
}

impl Timescale {
    /// `Finite(1/rate)` for a positive rate, `NoDecay` for a zero rate.
    pub fn from_rate(rate: f64) -> Self {
        if rate == 0.0 {
            Timescale::NoDecay
        } else {
            Timescale::Finite(1.0 / rate.abs())
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Timescale::Finite(v) => Some(v),
            Timescale::NoDecay => None,
        }
    }

    /// (t/τ)², zero when there is no decay.
    pub fn ratio_sq(self, t: f64) -> f64 {
        match self {
            Timescale::Finite(tau) => (t / tau) * (t / tau),
            Timescale::NoDecay => 0.0,
        }
    }
}

/// Validity-window note attached to a curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Warning {
    pub source: String,
    pub message: String,
}

impl Warning {
    pub fn new(source: &str, message: impl Into<String>) -> Self {
        Warning {
            source: source.to_string(),
            message: message.into(),
        }
    }
}

/// Sampled efficiency curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayCurve {
    pub times: Vec<f64>,
    pub eta: Vec<f64>,
    pub sigma_eta: Option<Vec<f64>>,
    pub warnings: Vec<Warning>,
}

impl DecayCurve {
    pub fn new(times: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        Self::with_sigma(times, eta, None)
    }

    pub fn with_sigma(times: Vec<f64>, eta: Vec<f64>, sigma_eta: Option<Vec<f64>>) -> Result<Self> {
        if times.len() != eta.len() {
            return Err(Error::invalid("times and eta differ in length"));
        }
        if let Some(s) = &sigma_eta {
            if s.len() != times.len() {
                return Err(Error::invalid("sigma_eta length differs from times"));
            }
            if s.iter().any(|v| !(*v >= 0.0)) {
                return Err(Error::invalid("sigma_eta must be >= 0"));
            }
        }
        check_times(&times)?;
        if let Some(i) = eta.iter().position(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::invalid(format!("eta[{i}] = {} is negative or not finite", eta[i])));
        }
        Ok(DecayCurve {
            times,
            eta,
            sigma_eta,
            warnings: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub(crate) fn check_times(times: &[f64]) -> Result<()> {
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid("times must be finite"));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::invalid("times must be strictly increasing"));
    }
    Ok(())
}

/// Thermally averaged coherence C(t) with its normalizations μ(0), μ(t).
#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceSeries {
    pub times: Vec<f64>,
    pub c: Vec<Complex64>,
    pub mu0: f64,
    pub mu_t: Vec<f64>,
}

impl CoherenceSeries {
    /// Series for a plane-wave or commuting case, where μ(t) = μ(0).
    pub fn normalized(times: Vec<f64>, c: Vec<Complex64>, mu0: f64) -> Self {
        let mu_t = vec![mu0; times.len()];
        CoherenceSeries { times, c, mu0, mu_t }
    }

    /// |C|²/(μ(0)μ(t)) at every sample.
    pub fn eta_ratio(&self) -> Vec<f64> {
        self.c
            .iter()
            .zip(&self.mu_t)
            .map(|(c, mu)| c.norm_sqr() / (self.mu0 * mu))
            .collect()
    }

    pub fn to_curve(&self) -> Result<DecayCurve> {
        DecayCurve::new(self.times.clone(), self.eta_ratio())
    }

    /// Largest relative violation of |C(t)|² ≤ μ(0)μ(t); ≤ 0 when satisfied.
    pub fn cauchy_schwarz_excess(&self) -> f64 {
        self.c
            .iter()
            .zip(&self.mu_t)
            .map(|(c, mu)| c.norm_sqr() / (self.mu0 * mu) - 1.0)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Decay mechanism with its parameters, all SI.
#[derive(Clone)]
pub enum Mechanism {
    Recoil { k_r: f64, sigma_v: f64 },
    HarmonicSag {
        tau_f: Timescale,
        tau_kappa: Timescale,
        bounds: Option<RamanNathBounds>,
    },
    LinearForce(LinearForce),
    Exponential { gamma: f64 },
    ReleaseBec { a0: f64, waist: f64, omega: f64 },
    ReleaseThermal {
        sigma_x: f64,
        sigma_v: f64,
        waist: f64,
        mass: f64,
        dims: ReleaseDims,
    },
    Kuhr(Kuhr),
    RamanNathGeneral(RamanNathGeneral),
    /// Phenomenological exp(−t²/τ_off²) factor.
    GaussianOffset { tau_off: Timescale },
    /// Product of independent mechanisms.
    Composite(Vec<Mechanism>),
}

impl std::fmt::Debug for Mechanism {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl Mechanism {
    pub fn name(&self) -> &'static str {
        match self {
            Mechanism::Recoil { .. } => "recoil",
            Mechanism::HarmonicSag { .. } => "harmonic_sag",
            Mechanism::LinearForce(_) => "linear_force",
            Mechanism::Exponential { .. } => "exponential",
            Mechanism::ReleaseBec { .. } => "release_bec",
            Mechanism::ReleaseThermal { .. } => "release_thermal",
            Mechanism::Kuhr(_) => "kuhr",
            Mechanism::RamanNathGeneral(_) => "raman_nath_general",
            Mechanism::GaussianOffset { .. } => "gaussian_offset",
            Mechanism::Composite(_) => "composite",
        }
    }

    /// η(t)/η₀.
    pub fn ratio(&self, t: f64) -> Result<f64> {
        Ok(match self {
            Mechanism::Recoil { k_r, sigma_v } => eta_recoil(t, *k_r, *sigma_v),
            Mechanism::HarmonicSag { tau_f, tau_kappa, .. } => {
                eta_harmonic_sag(t, *tau_f, *tau_kappa)
            }
            Mechanism::LinearForce(lf) => lf.eta(t),
            Mechanism::Exponential { gamma } => (-gamma * t).exp(),
            Mechanism::ReleaseBec { a0, waist, omega } => eta_release_bec(t, *a0, *waist, *omega),
            Mechanism::ReleaseThermal {
                sigma_x,
                sigma_v,
                waist,
                mass,
                dims,
            } => eta_release_thermal(t, *sigma_x, *sigma_v, *waist, *mass, *dims),
            Mechanism::Kuhr(k) => k.eta(t),
            Mechanism::RamanNathGeneral(rn) => rn.eta(t)?,
            Mechanism::GaussianOffset { tau_off } => (-tau_off.ratio_sq(t)).exp(),
            Mechanism::Composite(parts) => {
                let mut acc = 1.0;
                for p in parts {
                    acc *= p.ratio(t)?;
                }
                acc
            }
        })
    }

    /// Validity-window warnings for a set of sample times.
    pub fn warnings(&self, times: &[f64]) -> Vec<Warning> {
        let t_max = times.iter().cloned().fold(0.0, f64::max);
        match self {
            Mechanism::HarmonicSag {
                bounds: Some(b), ..
            } => b.check(t_max),
            Mechanism::Kuhr(k) => k.window_warnings(),
            Mechanism::RamanNathGeneral(rn) => rn.validity_warnings(t_max),
            Mechanism::Composite(parts) => parts.iter().flat_map(|p| p.warnings(times)).collect(),
            _ => Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::invalid(m.to_string()));
        match self {
            Mechanism::Recoil { sigma_v, k_r } if !(*sigma_v >= 0.0) || !k_r.is_finite() => {
                bad("recoil needs σ_v >= 0 and finite k_R")
            }
            Mechanism::Exponential { gamma } if !(*gamma >= 0.0) => bad("γ must be >= 0"),
            Mechanism::ReleaseBec { a0, waist, omega }
                if !(*a0 > 0.0) || !(*waist > 0.0) || !(*omega > 0.0) =>
            {
                bad("release_bec needs a₀, w, ω > 0")
            }
            Mechanism::ReleaseThermal {
                sigma_x,
                sigma_v,
                waist,
                mass,
                ..
            } if !(*sigma_x > 0.0) || !(*sigma_v >= 0.0) || !(*waist > 0.0) || !(*mass > 0.0) => {
                bad("release_thermal needs σ_x, w, m > 0 and σ_v >= 0")
            }
            Mechanism::Composite(parts) => parts.iter().try_for_each(|p| p.validate()),
            _ => Ok(()),
        }
    }
}

/// A mechanism together with the empirical t-independent efficiency η₀.
#[derive(Debug, Clone)]
pub struct ScenarioModel {
    pub mechanism: Mechanism,
    pub eta0: f64,
}

impl ScenarioModel {
    pub fn new(mechanism: Mechanism, eta0: f64) -> Result<Self> {
        if !(eta0 > 0.0 && eta0 <= 1.0) {
            return Err(Error::invalid("η₀ must lie in (0, 1]"));
        }
        mechanism.validate()?;
        Ok(ScenarioModel { mechanism, eta0 })
    }

    /// Absolute efficiency η(t) = η₀ · η(t)/η₀.
    pub fn efficiency(&self, t: f64) -> Result<f64> {
        Ok(self.eta0 * self.mechanism.ratio(t)?)
    }

    /// η(t)/η₀ on a time grid, with validity warnings attached.
    pub fn ratio_curve(&self, times: &[f64]) -> Result<DecayCurve> {
        check_times(times)?;
        let eta: Result<Vec<f64>> = times.par_iter().map(|&t| self.mechanism.ratio(t)).collect();
        let mut curve = DecayCurve::new(times.to_vec(), eta?)?;
        curve.warnings = self.mechanism.warnings(times);
        Ok(curve)
    }

    /// Absolute η(t) on a time grid.
    pub fn curve(&self, times: &[f64]) -> Result<DecayCurve> {
        let mut c = self.ratio_curve(times)?;
        for v in &mut c.eta {
            *v *= self.eta0;
        }
        Ok(c)
    }
}

/// First time at which a nonincreasing curve drops to `level`, by bisection
/// on `f` inside `[0, t_hi]`. `None` if it never gets there.
pub fn crossing_time(f: impl Fn(f64) -> f64, level: f64, t_hi: f64) -> Option<f64> {
    if f(t_hi) > level {
        return None;
    }
    let (mut lo, mut hi) = (0.0, t_hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > level {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timescale_flags() {
        assert_eq!(Timescale::from_rate(0.0), Timescale::NoDecay);
        assert_eq!(Timescale::NoDecay.ratio_sq(1e3), 0.0);
        assert_eq!(Timescale::from_rate(2.0).finite(), Some(0.5));
    }

    #[test]
    fn decay_curve_validation() {
        assert!(DecayCurve::new(vec![0.0, 1.0], vec![1.0, 0.5]).is_ok());
        assert!(DecayCurve::new(vec![1.0, 1.0], vec![1.0, 0.5]).is_err());
        assert!(DecayCurve::new(vec![0.0, 1.0], vec![1.0, -0.5]).is_err());
        assert!(DecayCurve::new(vec![0.0], vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn eta0_range() {
        let m = Mechanism::Exponential { gamma: 1.0 };
        assert!(ScenarioModel::new(m.clone(), 0.0).is_err());
        assert!(ScenarioModel::new(m.clone(), 1.5).is_err());
        let s = ScenarioModel::new(m, 0.15).unwrap();
        assert!((s.efficiency(0.0).unwrap() - 0.15).abs() < 1e-15);
    }

    #[test]
    fn exponential_radiative() {
        let tau = 65e-6;
        let m = Mechanism::Exponential { gamma: 1.0 / tau };
        assert!((m.ratio(tau).unwrap() - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(m.ratio(0.0).unwrap(), 1.0);
        let z = Mechanism::Exponential { gamma: 0.0 };
        assert_eq!(z.ratio(1.0).unwrap(), 1.0);
    }

    #[test]
    fn crossing_of_gaussian() {
        let t = crossing_time(|t| (-(t / 3.0f64).powi(2)).exp(), (-1.0f64).exp(), 100.0).unwrap();
        assert!((t - 3.0).abs() < 1e-12);
        assert!(crossing_time(|_| 1.0, 0.5, 1.0).is_none());
    }
}
