//! Free expansion after release from a 1D harmonic trap, with no photon
//! recoil and a Gaussian signal mode of waist w.

use crate::constants::HBAR;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReleaseDims {
    One,
    Two,
}

/// Exact 1D result for a condensate in the oscillator ground state of
/// length a₀ = √(ħ/mω).
pub fn eta_release_bec(t: f64, a0: f64, w: f64, omega: f64) -> f64 {
    let a2 = a0 * a0;
    let w2 = w * w;
    let wt2 = (omega * t).powi(2);
    let s = 2.0 * a2 + w2;
    let num = w2 * w2 * s * (s + 2.0 * a2 * wt2);
    let den = s * s * (w2 + a2 * wt2).powi(2) + 4.0 * a2.powi(4) * wt2;
    (num / den).sqrt()
}

/// τ_a = m a₀ w/ħ.
pub fn tau_a(mass: f64, a0: f64, w: f64) -> f64 {
    mass * a0 * w / HBAR
}

/// a₀ ≪ w limit: √(1 + 2t²/τ_a²)/(1 + t²/τ_a²).
pub fn eta_release_bec_wide_beam(t: f64, tau_a: f64) -> f64 {
    let x = (t / tau_a).powi(2);
    (1.0 + 2.0 * x).sqrt() / (1.0 + x)
}

/// w ≪ a₀ limit: 1/√(1 + t²/τ_w²) with τ_w = m w²/ħ.
pub fn eta_release_bec_narrow_beam(t: f64, mass: f64, w: f64) -> f64 {
    let tau_w = mass * w * w / HBAR;
    1.0 / (1.0 + (t / tau_w).powi(2)).sqrt()
}

/// σ_v,r = √(σ_v² + ħ²/(m²w²)).
pub fn release_velocity(sigma_v: f64, mass: f64, w: f64) -> f64 {
    (sigma_v * sigma_v + (HBAR / (mass * w)).powi(2)).sqrt()
}

/// τ_rel = w/σ_v,r.
pub fn tau_rel(sigma_v: f64, mass: f64, w: f64) -> f64 {
    w / release_velocity(sigma_v, mass, w)
}

/// High-temperature approximation built from Gaussian densities of widths
/// σ_g(t) and σ_r(t). `Two` squares the 1D result.
pub fn eta_release_thermal(
    t: f64,
    sigma_x: f64,
    sigma_v: f64,
    w: f64,
    mass: f64,
    dims: ReleaseDims,
) -> f64 {
    let sg2 = sigma_x * sigma_x + (sigma_v * t).powi(2);
    let sr0_2 = 1.0 / (1.0 / (sigma_x * sigma_x) + 4.0 / (w * w));
    let svr = release_velocity(sigma_v, mass, w);
    let sr2 = sr0_2 + (svr * t).powi(2);
    let inv_w2 = 1.0 / (w * w);
    let one_d = (0.25 / sg2 + inv_w2).sqrt() / sr2.sqrt() / (0.25 / sg2 + 0.25 / sr2 + inv_w2);
    // At t = 0 the expression is 1 analytically; pin it against rounding.
    let one_d = if t == 0.0 { 1.0 } else { one_d.min(1.0) };
    match dims {
        ReleaseDims::One => one_d,
        ReleaseDims::Two => one_d * one_d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::M_RB87;
    use crate::physics::{oscillator_length, thermal_velocity};
    use std::f64::consts::PI;

    #[test]
    fn bec_at_zero() {
        assert!((eta_release_bec(0.0, 1.1e-6, 8e-6, 600.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tau_a_reference() {
        let omega = 2.0 * PI * 96.0;
        let a0 = oscillator_length(M_RB87, omega);
        let ta = tau_a(M_RB87, a0, 8e-6);
        assert!((ta / 12e-3 - 1.0).abs() < 0.03, "{ta}");
        // τ_a = w/(a₀ω)
        assert!((ta - 8e-6 / (a0 * omega)).abs() / ta < 1e-12);
    }

    #[test]
    fn narrow_beam_limit() {
        let omega = 2.0 * PI * 96.0;
        let a0 = oscillator_length(M_RB87, omega);
        for ratio in [0.1, 0.05] {
            let w = ratio * a0;
            let tau_w = M_RB87 * w * w / HBAR;
            for x in [0.3, 1.0, 3.0] {
                let t = x * tau_w;
                let e = eta_release_bec(t, a0, w, omega);
                let l = eta_release_bec_narrow_beam(t, M_RB87, w);
                assert!((e / l - 1.0).abs() < 0.01, "{ratio} {x} {e} {l}");
            }
        }
    }

    #[test]
    fn wide_beam_limit() {
        let omega = 2.0 * PI * 96.0;
        let a0 = oscillator_length(M_RB87, omega);
        let w = 100.0 * a0;
        let ta = tau_a(M_RB87, a0, w);
        for x in [0.3, 1.0, 3.0] {
            let e = eta_release_bec(x * ta, a0, w, omega);
            assert!((e / eta_release_bec_wide_beam(x * ta, ta) - 1.0).abs() < 1e-3);
        }
    }

    #[test]
    fn tau_rel_reference() {
        let sv = thermal_velocity(0.2e-6, M_RB87);
        let tr = tau_rel(sv, M_RB87, 8e-6);
        assert!((tr / 1.8e-3 - 1.0).abs() < 0.03, "{tr}");
    }

    #[test]
    fn thermal_two_dims_is_square() {
        let sv = thermal_velocity(0.2e-6, M_RB87);
        let sx = sv / (2.0 * PI * 96.0);
        for t in [0.0, 1e-4, 1e-3, 5e-3] {
            let one = eta_release_thermal(t, sx, sv, 8e-6, M_RB87, ReleaseDims::One);
            let two = eta_release_thermal(t, sx, sv, 8e-6, M_RB87, ReleaseDims::Two);
            assert_eq!(two, one * one);
        }
        assert_eq!(eta_release_thermal(0.0, sx, sv, 8e-6, M_RB87, ReleaseDims::One), 1.0);
    }

    #[test]
    fn thermal_narrow_beam_form() {
        // w ≪ σ_x: middle expression √(1+4x)/(1+2x), x = t²/τ_rel²
        let sv = thermal_velocity(20e-6, M_RB87);
        let sx = 1e-3;
        let w = 2e-6;
        let tr = tau_rel(sv, M_RB87, w);
        for y in [0.5, 1.0, 2.0] {
            let t = y * tr;
            let x = y * y;
            let approx = (1.0 + 4.0 * x).sqrt() / (1.0 + 2.0 * x);
            let e = eta_release_thermal(t, sx, sv, w, M_RB87, ReleaseDims::One);
            assert!((e / approx - 1.0).abs() < 1e-3, "{e} {approx}");
        }
    }
}
