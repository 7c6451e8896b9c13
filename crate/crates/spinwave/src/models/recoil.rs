//! Photon-recoil dephasing in a homogeneous thermal gas.

use std::f64::consts::PI;

use super::Timescale;
use crate::constants::HBAR;

/// τ_R = 1/(k_R σ_v).
pub fn recoil_time(k_r: f64, sigma_v: f64) -> Timescale {
    Timescale::from_rate(k_r * sigma_v)
}

/// τ_R = λ_dB/(v_R √(2π)): the time the recoil velocity needs to cover the
/// thermal coherence length.
pub fn recoil_time_from_coherence_length(lambda_db: f64, v_r: f64) -> Timescale {
    Timescale::from_rate(v_r * (2.0 * PI).sqrt() / lambda_db)
}

/// Two-photon recoil velocity v_R = ħk_R/m.
pub fn recoil_velocity(k_r: f64, mass: f64) -> f64 {
    HBAR * k_r / mass
}

/// η/η₀ = exp(−t²/τ_R²).
pub fn eta_recoil(t: f64, k_r: f64, sigma_v: f64) -> f64 {
    (-recoil_time(k_r, sigma_v).ratio_sq(t)).exp()
}
