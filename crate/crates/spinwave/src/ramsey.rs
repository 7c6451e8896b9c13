//! Ramsey fringes, fringe visibility and spatial first-order coherence, all
//! expressed through the dark-time coherence C(t).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::{CoherenceSeries, Error, Result};

/// Dark-time coherence as a function of time.
pub type CoherenceFn = Arc<dyn Fn(f64) -> Result<Complex64> + Send + Sync>;

/// Pulse regime in which the pulse acts as position-independent amplitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RamseyRegime {
    /// Plane-wave beams, any pulse area.
    PlaneWave,
    /// Any mode shape, small pulse area φ_Ram with c_b = −iφ_Ram/2.
    SmallArea,
}

/// Largest pulse area accepted in the small-area regime.
pub const SMALL_AREA_LIMIT: f64 = 0.5;

#[derive(Clone)]
pub struct RamseyConfig {
    /// Δ_R in rad/s.
    pub detuning: f64,
    pub c_a: Complex64,
    pub c_b: Complex64,
    pub regime: RamseyRegime,
    coherence: CoherenceFn,
    c0: Complex64,
}

impl std::fmt::Debug for RamseyConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RamseyConfig")
            .field("detuning", &self.detuning)
            .field("c_a", &self.c_a)
            .field("c_b", &self.c_b)
            .field("regime", &self.regime)
            .field("c0", &self.c0)
            .finish()
    }
}

impl RamseyConfig {
    /// Plane-wave regime with explicit pulse coefficients.
    pub fn plane_wave(detuning: f64, c_a: Complex64, c_b: Complex64, coherence: CoherenceFn) -> Result<Self> {
        if c_a.norm_sqr() + c_b.norm_sqr() > 1.0 + 1e-12 {
            return Err(Error::invalid("pulse coefficients need |c_a|² + |c_b|² <= 1"));
        }
        Self::build(detuning, c_a, c_b, RamseyRegime::PlaneWave, coherence)
    }

    /// Small-area regime: c_b = −iφ/2, c_a = √(1 − φ²/4).
    pub fn small_area(detuning: f64, phi_ram: f64, coherence: CoherenceFn) -> Result<Self> {
        if !(phi_ram.abs() <= SMALL_AREA_LIMIT) {
            return Err(Error::invalid(format!(
                "pulse area {phi_ram} is outside the small-area regime (|φ| <= {SMALL_AREA_LIMIT})"
            )));
        }
        let c_b = Complex64::new(0.0, -0.5 * phi_ram);
        let c_a = Complex64::new((1.0 - c_b.norm_sqr()).sqrt(), 0.0);
        Self::build(detuning, c_a, c_b, RamseyRegime::SmallArea, coherence)
    }

    fn build(
        detuning: f64,
        c_a: Complex64,
        c_b: Complex64,
        regime: RamseyRegime,
        coherence: CoherenceFn,
    ) -> Result<Self> {
        if !detuning.is_finite() {
            return Err(Error::invalid("detuning must be finite"));
        }
        let c0 = coherence(0.0)?;
        if !(c0.norm() > 0.0) {
            return Err(Error::invalid("C(0) = 0: visibility is undefined"));
        }
        Ok(RamseyConfig {
            detuning,
            c_a,
            c_b,
            regime,
            coherence,
            c0,
        })
    }

    /// P_{r,0} = 4|c_a c_b|²|C(0)|.
    pub fn p_r0(&self) -> f64 {
        4.0 * (self.c_a * self.c_b).norm_sqr() * self.c0.norm()
    }
}

/// Linear interpolation of C(t) inside a sampled series; C(0) is μ(0).
pub fn series_coherence(series: &CoherenceSeries) -> Result<CoherenceFn> {
    if series.times.len() != series.c.len() || series.times.is_empty() {
        return Err(Error::invalid("empty or inconsistent coherence series"));
    }
    let s = series.clone();
    Ok(Arc::new(move |t: f64| {
        if t == 0.0 {
            return Ok(Complex64::new(s.mu0, 0.0));
        }
        let i = s.times.partition_point(|x| *x < t);
        if i < s.times.len() && s.times[i] == t {
            return Ok(s.c[i]);
        }
        if i == 0 || i == s.times.len() {
            return Err(Error::invalid(format!("t = {t} lies outside the sampled coherence")));
        }
        let (t0, t1) = (s.times[i - 1], s.times[i]);
        let f = (t - t0) / (t1 - t0);
        Ok(s.c[i - 1] * (1.0 - f) + s.c[i] * f)
    }))
}

/// P_r(t) = (P_{r,0}/2)[1 + V cos(Δ_R t + ϑ_Ram)], V = |C(t)/C(0)|,
/// ϑ_Ram = arg C(t).
pub fn ramsey_signal(t: f64, cfg: &RamseyConfig) -> Result<f64> {
    let c = (cfg.coherence)(t)?;
    let v = (c / cfg.c0).norm();
    Ok(0.5 * cfg.p_r0() * (1.0 + v * (cfg.detuning * t + c.arg()).cos()))
}

/// V(t) = |C(t)|/C(0) with C(0) = μ(0).
pub fn visibility(series: &CoherenceSeries) -> Result<Vec<f64>> {
    if !(series.mu0 > 0.0) {
        return Err(Error::invalid("C(0) = 0: visibility is undefined"));
    }
    Ok(series.c.iter().map(|c| c.norm() / series.mu0).collect())
}

/// g¹(r) = exp(−πr²/λ_dB²) of a homogeneous noninteracting thermal gas, so
/// that |g¹|² = exp(−2πr²/λ_dB²).
pub fn g1_thermal(r: f64, lambda_db: f64) -> f64 {
    (-PI * r * r / (lambda_db * lambda_db)).exp()
}

/// η/η₀ = |g¹(v_R t)|².
pub fn eta_from_g1(v_r: f64, t: f64, lambda_db: f64) -> f64 {
    let g = g1_thermal(v_r * t, lambda_db);
    g * g
}
