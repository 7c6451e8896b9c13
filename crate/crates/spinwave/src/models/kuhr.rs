//! Differential trapping of a d-dimensional thermal gas without photon recoil
//! and with an infinitely wide beam: the energy-conserving estimate of Kuhr et
//! al. and the Raman-Nath estimate.

use super::{Timescale, Warning};
use crate::constants::HBAR;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KuhrVariant {
    /// |C|² = (1 + t²/K²)^(−d), K = βħω_g/(ω_g − ω_r)
    KuhrIntermediate,
    /// |C|² = (1 + t²/τ_κ'²)^(−d/2), τ_κ' = βħκ_g/|κ_g − κ_r|
    RamanNathHighT,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Kuhr {
    pub beta: f64,
    pub kappa_g: f64,
    pub kappa_r: f64,
    pub mass: f64,
    pub dims: u32,
    pub variant: KuhrVariant,
}

impl Kuhr {
    pub fn new(
        beta: f64,
        kappa_g: f64,
        kappa_r: f64,
        mass: f64,
        dims: u32,
        variant: KuhrVariant,
    ) -> Result<Self> {
        if !(beta > 0.0) || !(kappa_g > 0.0) || !(mass > 0.0) {
            return Err(Error::invalid("Kuhr model needs β, κ_g, m > 0"));
        }
        if !(1..=3).contains(&dims) {
            return Err(Error::invalid("dimension must be 1, 2 or 3"));
        }
        if variant == KuhrVariant::KuhrIntermediate && !(kappa_r > 0.0) {
            return Err(Error::invalid("the Kuhr variant needs a trapping κ_r > 0"));
        }
        if !kappa_r.is_finite() {
            return Err(Error::invalid("κ_r must be finite"));
        }
        Ok(Kuhr {
            beta,
            kappa_g,
            kappa_r,
            mass,
            dims,
            variant,
        })
    }

    fn omega_g(&self) -> f64 {
        (self.kappa_g / self.mass).sqrt()
    }

    /// τ_κ' = βħκ_g/|κ_g − κ_r|.
    pub fn tau_kappa(&self) -> Timescale {
        Timescale::from_rate((self.kappa_g - self.kappa_r).abs() / (self.beta * HBAR * self.kappa_g))
    }

    /// K = βħω_g/(ω_g − ω_r), as a magnitude.
    pub fn k_time(&self) -> Timescale {
        let wg = self.omega_g();
        let wr = (self.kappa_r.max(0.0) / self.mass).sqrt();
        Timescale::from_rate((wg - wr).abs() / (self.beta * HBAR * wg))
    }

    /// |C(t)|².
    pub fn eta(&self, t: f64) -> f64 {
        if self.kappa_g == self.kappa_r {
            return 1.0;
        }
        let d = self.dims as f64;
        match self.variant {
            KuhrVariant::KuhrIntermediate => (1.0 + self.k_time().ratio_sq(t)).powf(-d),
            KuhrVariant::RamanNathHighT => (1.0 + self.tau_kappa().ratio_sq(t)).powf(-0.5 * d),
        }
    }

    /// Time where |C|² = 1/e.
    pub fn one_over_e_time(&self) -> Timescale {
        let d = self.dims as f64;
        match self.variant {
            KuhrVariant::KuhrIntermediate => match self.k_time() {
                Timescale::Finite(k) => Timescale::Finite(k * ((1.0 / d).exp() - 1.0).sqrt()),
                Timescale::NoDecay => Timescale::NoDecay,
            },
            KuhrVariant::RamanNathHighT => match self.tau_kappa() {
                Timescale::Finite(tk) => Timescale::Finite(tk * ((2.0 / d).exp() - 1.0).sqrt()),
                Timescale::NoDecay => Timescale::NoDecay,
            },
        }
    }

    /// |Δa|/a_g with a ∝ κ^(−1/4).
    pub fn relative_length_change(&self) -> f64 {
        ((self.kappa_g / self.kappa_r).powf(0.25) - 1.0).abs()
    }

    /// Checks ħω_g ≪ k_BT ≪ ħω_g a_g/|Δa| (factor 10 margin each side).
    pub fn window_warnings(&self) -> Vec<Warning> {
        if self.variant != KuhrVariant::KuhrIntermediate {
            return Vec::new();
        }
        let mut out = Vec::new();
        let x = self.beta * HBAR * self.omega_g();
        if x > 0.1 {
            out.push(Warning::new(
                "kuhr",
                format!("ħω_g/k_BT = {x:.3} is not small; the sum over n is not an integral"),
            ));
        }
        let da = self.relative_length_change();
        if da > 0.1 * x {
            out.push(Warning::new(
                "kuhr",
                format!(
                    "|Δa|/a_g = {da:.3e} is not small against ħω_g/k_BT = {x:.3e}; outside the intermediate-temperature window"
                ),
            ));
        }
        out
    }
}

/// Convenience wrapper returning |C(t)|².
pub fn eta_kuhr(
    t: f64,
    beta: f64,
    kappa_g: f64,
    kappa_r: f64,
    mass: f64,
    dims: u32,
    variant: KuhrVariant,
) -> Result<f64> {
    Ok(Kuhr::new(beta, kappa_g, kappa_r, mass, dims, variant)?.eta(t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{K_B, M_RB87};
    use crate::models::crossing_time;

    fn pair(eta_rel: f64, dims: u32) -> (Kuhr, Kuhr) {
        let kg = M_RB87 * (2.0 * std::f64::consts::PI * 1e3f64).powi(2);
        let kr = kg * (1.0 - eta_rel);
        let beta = 1.0 / (K_B * 10e-6);
        (
            Kuhr::new(beta, kg, kr, M_RB87, dims, KuhrVariant::KuhrIntermediate).unwrap(),
            Kuhr::new(beta, kg, kr, M_RB87, dims, KuhrVariant::RamanNathHighT).unwrap(),
        )
    }

    #[test]
    fn three_d_one_over_e_times() {
        let (k, rn) = pair(1e-4, 3);
        let tk = k.tau_kappa().finite().unwrap();
        let a = k.one_over_e_time().finite().unwrap() / tk;
        let b = rn.one_over_e_time().finite().unwrap() / tk;
        assert!((a / 1.26 - 1.0).abs() < 0.01, "{a}");
        assert!((b / 0.97 - 1.0).abs() < 0.01, "{b}");
        // and the closed forms agree with a direct root search
        let e = (-1.0f64).exp();
        let ra = crossing_time(|t| k.eta(t), e, 100.0 * tk).unwrap() / tk;
        assert!((ra - a).abs() < 1e-9);
    }

    #[test]
    fn zero_time_and_equal_traps() {
        let (k, rn) = pair(1e-3, 2);
        assert_eq!(k.eta(0.0), 1.0);
        assert_eq!(rn.eta(0.0), 1.0);
        let same = Kuhr::new(1e20, 1.0, 1.0, M_RB87, 3, KuhrVariant::KuhrIntermediate).unwrap();
        assert_eq!(same.eta(1.0), 1.0);
    }

    #[test]
    fn raman_nath_2d_matches_harmonic_sag() {
        use crate::models::harmonic::{eta_harmonic_sag, harmonic_trap_timescales};
        use crate::physics::thermal_velocity;
        let t_k = 0.2e-6;
        let omega = 2.0 * std::f64::consts::PI * 96.0;
        let kg = M_RB87 * omega * omega;
        let kr = -0.8 * kg;
        let sigma_x = thermal_velocity(t_k, M_RB87) / omega;
        let (_, tau_kappa) = harmonic_trap_timescales(2.0 * sigma_x, 0.0, kg, kr).unwrap();
        let rn = Kuhr::new(1.0 / (K_B * t_k), kg, kr, M_RB87, 2, KuhrVariant::RamanNathHighT).unwrap();
        for t in [1e-6, 50e-6, 300e-6] {
            let a = rn.eta(t);
            let b = eta_harmonic_sag(t, Timescale::NoDecay, tau_kappa);
            assert!((a / b - 1.0).abs() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn window_reported() {
        let (k, _) = pair(0.3, 1);
        assert!(!k.window_warnings().is_empty());
    }
}
