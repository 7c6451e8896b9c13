//! Differential harmonic trapping with gravitational sag, in the Raman-Nath
//! approximation.

use std::f64::consts::PI;

use super::{Timescale, Warning};
use crate::constants::HBAR;
use crate::physics::DerivedScales;
use crate::{Error, Result};

/// (τ_F, τ_κ) with τ_F = 2ħ/(w_r|F|) and τ_κ = 4ħ/(w_r²|κ_g − κ_r|).
pub fn harmonic_trap_timescales(
    w_r: f64,
    force: f64,
    kappa_g: f64,
    kappa_r: f64,
) -> Result<(Timescale, Timescale)> {
    if !(w_r > 0.0) {
        return Err(Error::invalid("w_r must be positive"));
    }
    let tau_f = Timescale::from_rate(w_r * force.abs() / (2.0 * HBAR));
    let tau_kappa = Timescale::from_rate(w_r * w_r * (kappa_g - kappa_r).abs() / (4.0 * HBAR));
    Ok((tau_f, tau_kappa))
}

pub fn timescales_from(scales: &DerivedScales) -> Result<(Timescale, Timescale)> {
    harmonic_trap_timescales(scales.w_r, scales.force, scales.kappa_g, scales.kappa_r)
}

/// η/η₀ = |ζ₁|⁻² exp(−(t²/τ_F²)/|ζ₁|²) with |ζ₁|² = 1 + t²/τ_κ².
pub fn eta_harmonic_sag(t: f64, tau_f: Timescale, tau_kappa: Timescale) -> f64 {
    let z = 1.0 + tau_kappa.ratio_sq(t);
    (-tau_f.ratio_sq(t) / z).exp() / z
}

/// Time limits below which the Raman-Nath approximation holds. A sample time
/// above `fraction` of any limit produces a warning.
#[derive(Debug, Clone, PartialEq)]
pub struct RamanNathBounds {
    /// 2π√(m/|κ_r − κ_g|)
    pub oscillation: Timescale,
    /// w_r/(2σ_v)
    pub thermal: Timescale,
    /// w_r/(2v_R)
    pub recoil: Timescale,
    /// m w_r²/(4ħ)
    pub dispersion: Timescale,
    pub fraction: f64,
}

impl RamanNathBounds {
    pub fn new(mass: f64, w_r: f64, sigma_v: f64, v_r: f64, kappa_g: f64, kappa_r: f64) -> Self {
        let dk = (kappa_r - kappa_g).abs();
        RamanNathBounds {
            oscillation: if dk == 0.0 {
                Timescale::NoDecay
            } else {
                Timescale::Finite(2.0 * PI * (mass / dk).sqrt())
            },
            thermal: Timescale::from_rate(2.0 * sigma_v / w_r),
            recoil: Timescale::from_rate(2.0 * v_r / w_r),
            dispersion: Timescale::Finite(mass * w_r * w_r / (4.0 * HBAR)),
            fraction: 0.1,
        }
    }

    pub fn check(&self, t_max: f64) -> Vec<Warning> {
        let mut out = Vec::new();
        for (name, tau) in [
            ("trap oscillation period 2π√(m/|Δκ|)", self.oscillation),
            ("thermal transit w_r/2σ_v", self.thermal),
            ("recoil transit w_r/2v_R", self.recoil),
            ("wave-packet dispersion m w_r²/4ħ", self.dispersion),
        ] {
            if let Timescale::Finite(limit) = tau {
                if t_max > self.fraction * limit {
                    out.push(Warning::new(
                        "raman_nath",
                        format!(
                            "t = {:.3e} s exceeds {:.0}% of the {name} ({limit:.3e} s)",
                            t_max,
                            100.0 * self.fraction
                        ),
                    ));
                }
            }
        }
        out
    }
}
