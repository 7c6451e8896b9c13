//! Exact solution for a homogeneous thermal gas in a Gaussian signal mode
//! when the Rydberg state feels a constant transverse force.
//!
//! The beam runs along z. Forces with a z component are rejected; a transverse
//! force is rotated into the x direction.

use super::Timescale;
use crate::constants::HBAR;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinearForceForm {
    /// ζ = 1 + it/τ_w + σ_v²t²/w² as is.
    Exact,
    /// |ζ| → 1 + σ_v²t²/w², Re((ζ−1)/ζ) → (|ζ|−1)/|ζ|, valid for wσ_k ≫ 1.
    HighTemperature,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearForce {
    waist: f64,
    sigma_v: f64,
    mass: f64,
    /// Recoil components in the frame with F along x.
    k_rx: f64,
    k_ry: f64,
    k_rz: f64,
    force: f64,
    pub form: LinearForceForm,
}

impl LinearForce {
    /// `k_r` and `force` are (x, y, z) with z along the signal beam.
    pub fn new(
        waist: f64,
        sigma_v: f64,
        mass: f64,
        k_r: [f64; 3],
        force: [f64; 3],
        form: LinearForceForm,
    ) -> Result<Self> {
        if !(waist > 0.0) || !(mass > 0.0) || !(sigma_v >= 0.0) {
            return Err(Error::invalid("linear force needs w > 0, m > 0, σ_v >= 0"));
        }
        if force[2] != 0.0 {
            return Err(Error::invalid(
                "force along the beam axis (F_z != 0) is not covered by this model",
            ));
        }
        if k_r.iter().chain(force.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid("k_R and F must be finite"));
        }
        let f = force[0].hypot(force[1]);
        let (k_rx, k_ry) = if f > 0.0 {
            let (cx, cy) = (force[0] / f, force[1] / f);
            (k_r[0] * cx + k_r[1] * cy, -k_r[0] * cy + k_r[1] * cx)
        } else {
            (k_r[0], k_r[1])
        };
        Ok(LinearForce {
            waist,
            sigma_v,
            mass,
            k_rx,
            k_ry,
            k_rz: k_r[2],
            force: f,
            form,
        })
    }

    /// τ_w = m w²/ħ.
    pub fn tau_w(&self) -> f64 {
        self.mass * self.waist * self.waist / HBAR
    }

    /// τ_F,∞ = 2ħ/(w|F|).
    pub fn tau_f_infinity(&self) -> Timescale {
        Timescale::from_rate(self.waist * self.force / (2.0 * HBAR))
    }

    /// w/σ_v
    pub fn thermal_exit_time(&self) -> Timescale {
        Timescale::from_rate(self.sigma_v / self.waist)
    }

    /// Returns (|ζ|², Re((ζ−1)/ζ)).
    fn zeta_terms(&self, t: f64) -> (f64, f64) {
        let u = (self.sigma_v * t / self.waist).powi(2);
        match self.form {
            LinearForceForm::Exact => {
                let s = t / self.tau_w();
                let mod_sq = (1.0 + u) * (1.0 + u) + s * s;
                (mod_sq, 1.0 - (1.0 + u) / mod_sq)
            }
            LinearForceForm::HighTemperature => ((1.0 + u) * (1.0 + u), u / (1.0 + u)),
        }
    }

    /// η(t)/η₀.
    pub fn eta(&self, t: f64) -> f64 {
        let (mod_sq, re) = self.zeta_terms(t);
        let w2 = self.waist * self.waist;
        let k_f = self.force * t / HBAR;
        let kx = self.k_rx + k_f;
        let exponent = -(t * self.k_rz * self.sigma_v).powi(2)
            - 0.25 * w2 * k_f * k_f
            - w2 * (self.k_ry * self.k_ry + kx * kx) * re;
        exponent.exp() / mod_sq
    }

    /// Limit where dispersion out of the beam dominates: 1/(1 + t²/τ_w²).
    pub fn eta_dispersion_limit(&self, t: f64) -> f64 {
        1.0 / (1.0 + (t / self.tau_w()).powi(2))
    }

    /// Limit where thermal motion out of the beam dominates: (1 + σ_v²t²/w²)⁻².
    pub fn eta_thermal_limit(&self, t: f64) -> f64 {
        let u = (self.sigma_v * t / self.waist).powi(2);
        1.0 / ((1.0 + u) * (1.0 + u))
    }

    /// F = 0 with transverse recoil, high-temperature |ζ|:
    /// |ζ|⁻² exp(−t²σ_v²(k_Rz² + (k_Rx² + k_Ry²)/|ζ|)).
    pub fn eta_transverse_recoil(&self, t: f64) -> f64 {
        let z = 1.0 + (self.sigma_v * t / self.waist).powi(2);
        let kt2 = self.k_rx * self.k_rx + self.k_ry * self.k_ry;
        (-(t * self.sigma_v).powi(2) * (self.k_rz * self.k_rz + kt2 / z)).exp() / (z * z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::M_RB87;

    const W: f64 = 8e-6;

    fn reference_force() -> f64 {
        M_RB87 * 9.8 * 1.8
    }

    #[test]
    fn tau_w_reference() {
        let lf = LinearForce::new(W, 0.0, M_RB87, [0.0; 3], [0.0; 3], LinearForceForm::Exact).unwrap();
        assert!((lf.tau_w() / 88e-3 - 1.0).abs() < 0.01, "{}", lf.tau_w());
    }

    #[test]
    fn rejects_axial_force() {
        let r = LinearForce::new(W, 0.0, M_RB87, [0.0; 3], [0.0, 0.0, 1e-24], LinearForceForm::Exact);
        assert!(r.is_err());
    }

    #[test]
    fn cold_forceless_is_dispersion() {
        let lf = LinearForce::new(W, 0.0, M_RB87, [0.0; 3], [0.0; 3], LinearForceForm::Exact).unwrap();
        for t in [0.0, 1e-3, 50e-3, 0.2] {
            assert!((lf.eta(t) - lf.eta_dispersion_limit(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn high_temperature_cold_is_gaussian() {
        let lf = LinearForce::new(
            W,
            0.0,
            M_RB87,
            [0.0; 3],
            [reference_force(), 0.0, 0.0],
            LinearForceForm::HighTemperature,
        )
        .unwrap();
        let tau = lf.tau_f_infinity().finite().unwrap();
        for t in [1e-6, 5e-6, 20e-6] {
            let g = (-(t / tau).powi(2)).exp();
            assert!((lf.eta(t) / g - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn force_direction_is_irrelevant() {
        let f = reference_force();
        let a = LinearForce::new(W, 4e-3, M_RB87, [1e6, 2e6, 5e6], [f, 0.0, 0.0], LinearForceForm::Exact)
            .unwrap();
        // rotate both F and transverse k_R by 90°
        let b = LinearForce::new(W, 4e-3, M_RB87, [-2e6, 1e6, 5e6], [0.0, f, 0.0], LinearForceForm::Exact)
            .unwrap();
        for t in [1e-6, 10e-6] {
            assert!((a.eta(t) / b.eta(t) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn thermal_limit_when_dominant() {
        // σ_v large, no force, no recoil: |ζ| ≈ 1 + σ_v²t²/w²
        let lf = LinearForce::new(W, 0.05, M_RB87, [0.0; 3], [0.0; 3], LinearForceForm::HighTemperature)
            .unwrap();
        for t in [1e-5, 1e-4, 1e-3] {
            assert!((lf.eta(t) - lf.eta_thermal_limit(t)).abs() < 1e-15);
        }
    }

    #[test]
    fn transverse_recoil_matches_general_form() {
        let lf = LinearForce::new(
            W,
            4e-3,
            M_RB87,
            [3e6, 1e6, 2e6],
            [0.0; 3],
            LinearForceForm::HighTemperature,
        )
        .unwrap();
        for t in [1e-6, 1e-5, 1e-4] {
            assert!((lf.eta(t) / lf.eta_transverse_recoil(t) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_close_to_high_temperature_at_operating_point() {
        let f = [reference_force(), 0.0, 0.0];
        let a = LinearForce::new(W, 4.4e-3, M_RB87, [0.0, 0.0, 5e6], f, LinearForceForm::Exact).unwrap();
        let b = LinearForce::new(W, 4.4e-3, M_RB87, [0.0, 0.0, 5e6], f, LinearForceForm::HighTemperature)
            .unwrap();
        for t in [1e-6, 10e-6, 30e-6] {
            assert!((a.eta(t) / b.eta(t) - 1.0).abs() < 1e-4);
        }
    }
}
