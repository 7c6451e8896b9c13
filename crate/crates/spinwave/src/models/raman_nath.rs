//! Raman-Nath coherence for arbitrary transverse density, mode and
//! differential potential:
//! C(t) = 𝒱 ∫ ρ_g |v|² exp(−i[V_r − V_g] t/ħ) dx dy.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use super::{RamanNathBounds, Warning};
use crate::constants::HBAR;
use crate::quad::{integrate_2d, QuadOptions};
use crate::{Error, Result};

pub type Field2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct RamanNathGeneral {
    density: Field2,
    mode_sq: Field2,
    dv: Field2,
    x_range: (f64, f64),
    y_range: (f64, f64),
    opts: QuadOptions,
    c0: Complex64,
    pub bounds: Option<RamanNathBounds>,
}

impl std::fmt::Debug for RamanNathGeneral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RamanNathGeneral")
            .field("x_range", &self.x_range)
            .field("y_range", &self.y_range)
            .field("c0", &self.c0)
            .finish()
    }
}

impl RamanNathGeneral {
    /// `dv` is V_r − V_g in J. The ranges should cover ±6σ of ρ_g|v|².
    pub fn new(
        density: Field2,
        mode_sq: Field2,
        dv: Field2,
        x_range: (f64, f64),
        y_range: (f64, f64),
        opts: QuadOptions,
    ) -> Result<Self> {
        if !(x_range.1 > x_range.0) || !(y_range.1 > y_range.0) {
            return Err(Error::invalid("integration ranges must be nonempty"));
        }
        let mut rn = RamanNathGeneral {
            density,
            mode_sq,
            dv,
            x_range,
            y_range,
            opts,
            c0: Complex64::new(0.0, 0.0),
            bounds: None,
        };
        rn.c0 = rn.coherence(0.0)?;
        if !(rn.c0.norm() > 0.0) {
            return Err(Error::invalid("density and mode do not overlap"));
        }
        Ok(rn)
    }

    /// Gaussian cloud of rms radii (σ_x, σ_y) and Gaussian mode of waist w,
    /// both centered at the origin.
    pub fn gaussian(sigma_x: f64, sigma_y: f64, waist: f64, dv: Field2, opts: QuadOptions) -> Result<Self> {
        if !(sigma_x > 0.0) || !(sigma_y > 0.0) || !(waist > 0.0) {
            return Err(Error::invalid("widths must be positive"));
        }
        let density: Field2 = Arc::new(move |x, y| {
            (-(x * x) / (2.0 * sigma_x * sigma_x) - (y * y) / (2.0 * sigma_y * sigma_y)).exp()
                / (2.0 * PI * sigma_x * sigma_y)
        });
        let w2 = waist * waist;
        let mode_sq: Field2 = Arc::new(move |x, y| 2.0 / (PI * w2) * (-2.0 * (x * x + y * y) / w2).exp());
        // rms width of ρ|v|²: 1/s² = 1/σ² + 4/w²
        let s = |sig: f64| (1.0 / (sig * sig) + 4.0 / w2).sqrt().recip();
        let (sx, sy) = (6.0 * s(sigma_x), 6.0 * s(sigma_y));
        Self::new(density, mode_sq, dv, (-sx, sx), (-sy, sy), opts)
    }

    pub fn with_bounds(mut self, bounds: RamanNathBounds) -> Self {
        self.bounds = Some(bounds);
        self
    }

    /// C(t) per unit quantization area.
    pub fn coherence(&self, t: f64) -> Result<Complex64> {
        let phase = -t / HBAR;
        let r = integrate_2d(
            |x, y| {
                let w = (self.density)(x, y) * (self.mode_sq)(x, y);
                Complex64::from_polar(w, phase * (self.dv)(x, y))
            },
            self.x_range,
            self.y_range,
            self.opts,
        )?;
        Ok(r.value)
    }

    /// η/η₀ = |C(t)/C(0)|².
    pub fn eta(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(1.0);
        }
        Ok((self.coherence(t)? / self.c0).norm_sqr())
    }

    pub fn validity_warnings(&self, t_max: f64) -> Vec<Warning> {
        self.bounds.as_ref().map(|b| b.check(t_max)).unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::M_RB87;
    use crate::models::harmonic::{eta_harmonic_sag, harmonic_trap_timescales};
    use crate::models::Timescale;
    use crate::physics::transferred_radius;

    #[test]
    fn no_potential_no_decay() {
        let rn = RamanNathGeneral::gaussian(7e-6, 7e-6, 8e-6, Arc::new(|_, _| 0.0), QuadOptions::default())
            .unwrap();
        for t in [1e-6, 1e-4] {
            assert!((rn.eta(t).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn quadratic_matches_closed_form() {
        let m = M_RB87;
        let omega = 2.0 * PI * 96.0;
        let kg = m * omega * omega;
        let kr = -0.8 * kg;
        let f = m * 9.8 * 1.8;
        let (sx, w) = (7.25e-6, 8e-6);
        let dk = kr - kg;
        let dv: Field2 = Arc::new(move |x, y| -f * x + 0.5 * dk * (x * x + y * y));
        let rn = RamanNathGeneral::gaussian(sx, sx, w, dv, QuadOptions::default()).unwrap();
        let (tf, tk) = harmonic_trap_timescales(transferred_radius(sx, w), f, kg, kr).unwrap();
        for t in [2e-6, 10e-6, 25e-6, 40e-6] {
            let a = rn.eta(t).unwrap();
            let b = eta_harmonic_sag(t, tf, tk);
            assert!((a / b - 1.0).abs() < 1e-6, "t={t}: {a} vs {b}");
        }
    }

    #[test]
    fn linear_point_like_cloud() {
        let m = M_RB87;
        let f = m * 9.8 * 1.8;
        let (sx, w) = (1e-7, 8e-6);
        let dv: Field2 = Arc::new(move |x, _| -f * x);
        let rn = RamanNathGeneral::gaussian(sx, sx, w, dv, QuadOptions::default()).unwrap();
        let w_r = transferred_radius(sx, w);
        let (tf, _) = harmonic_trap_timescales(w_r, f, 1.0, 1.0).unwrap();
        for t in [10e-6, 100e-6, 300e-6] {
            let a = rn.eta(t).unwrap();
            let b = eta_harmonic_sag(t, tf, Timescale::NoDecay);
            assert!((a / b - 1.0).abs() < 1e-6, "{a} {b}");
        }
    }
}
