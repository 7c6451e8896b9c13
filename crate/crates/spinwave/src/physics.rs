//! Scalar physics of the stored ensemble: species data, beam geometry, trap
//! parameters and the derived thermal and geometric scales.

use std::f64::consts::PI;

use crate::constants::{C, EPSILON_0, E_CHARGE, G_DEFAULT, HBAR, K_B, M_ELECTRON, M_RB87};
use crate::units::{au_to_si, si_to_au};
use crate::{Error, Result};

/// Atomic species. Polarizabilities are in atomic units.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub mass: f64,
    pub ground_polarizability_1064: f64,
    pub ground_polarizability_532: f64,
    /// Replaces the free-electron estimate when set.
    pub rydberg_polarizability_override: Option<f64>,
}

impl Species {
    /// ⁸⁷Rb with ground-state polarizabilities 687.3 a.u. (1064 nm) and
    /// −250 a.u. (532 nm).
    pub fn rb87() -> Self {
        Species {
            mass: M_RB87,
            ground_polarizability_1064: 687.3,
            ground_polarizability_532: -250.0,
            rydberg_polarizability_override: None,
        }
    }

    /// Rydberg-state polarizability in a.u. at `wavelength` (m).
    pub fn rydberg_polarizability(&self, wavelength: f64) -> f64 {
        self.rydberg_polarizability_override
            .unwrap_or_else(|| free_electron_polarizability(wavelength))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass > 0.0) || !self.mass.is_finite() {
            return Err(Error::invalid("species mass must be positive"));
        }
        Ok(())
    }
}

/// Ponderomotive polarizability −e²/(m_e ω²) of a free electron, in a.u.
pub fn free_electron_polarizability(wavelength: f64) -> f64 {
    let omega = 2.0 * PI * C / wavelength;
    si_to_au(-E_CHARGE * E_CHARGE / (M_ELECTRON * omega * omega))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Propagation {
    Counterpropagating,
    Copropagating,
}

/// Signal and coupling beams. Lengths in m.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamGeometry {
    /// λ_eg
    pub signal_wavelength: f64,
    /// λ_re
    pub coupling_wavelength: f64,
    pub geometry: Propagation,
    /// w
    pub signal_waist: f64,
}

impl BeamGeometry {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("signal wavelength", self.signal_wavelength),
            ("coupling wavelength", self.coupling_wavelength),
            ("signal waist", self.signal_waist),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Trap seen by the ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapConfig {
    /// Radial angular trap frequency ω, rad/s.
    pub radial_frequency: f64,
    /// Trap depth, J.
    pub depth: Option<f64>,
    /// Trap-beam waist w_t, m.
    pub beam_waist: Option<f64>,
    /// α_r/α_g at the trap wavelength.
    pub polarizability_ratio: f64,
    /// Gravitational acceleration, m/s².
    pub gravity: f64,
}

impl TrapConfig {
    pub fn new(radial_frequency: f64, polarizability_ratio: f64) -> Self {
        TrapConfig {
            radial_frequency,
            depth: None,
            beam_waist: None,
            polarizability_ratio,
            gravity: G_DEFAULT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radial_frequency >= 0.0) || !self.radial_frequency.is_finite() {
            return Err(Error::invalid("trap frequency must be >= 0"));
        }
        if !self.polarizability_ratio.is_finite() || !self.gravity.is_finite() {
            return Err(Error::invalid("polarizability ratio and gravity must be finite"));
        }
        if let Some(d) = self.depth {
            if !(d > 0.0) {
                return Err(Error::invalid("trap depth must be positive"));
            }
        }
        if let Some(w) = self.beam_waist {
            if !(w > 0.0) {
                return Err(Error::invalid("trap beam waist must be positive"));
            }
        }
        Ok(())
    }
}

/// Temperature (K), atom number and medium length (m). T = 0 selects the BEC
/// branch wherever one exists.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalEnsemble {
    pub temperature: f64,
    pub atom_number: f64,
    pub medium_length: f64,
}

impl ThermalEnsemble {
    pub fn is_condensate(&self) -> bool {
        self.temperature == 0.0
    }

    /// β = 1/(k_B T).
    pub fn beta(&self) -> Result<f64> {
        if !(self.temperature > 0.0) {
            return Err(Error::invalid("temperature must be positive for β"));
        }
        Ok(1.0 / (K_B * self.temperature))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub species: Species,
    pub beams: BeamGeometry,
    pub trap: TrapConfig,
    pub ensemble: ThermalEnsemble,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.species.validate()?;
        self.beams.validate()?;
        self.trap.validate()?;
        let e = &self.ensemble;
        if !(e.temperature >= 0.0) || !e.temperature.is_finite() {
            return Err(Error::invalid("temperature must be >= 0"));
        }
        if !(e.atom_number >= 0.0) || !(e.medium_length > 0.0) {
            return Err(Error::invalid("atom number must be >= 0 and medium length > 0"));
        }
        Ok(())
    }

    /// Differential-light-shift trap stiffness κ_g = mω².
    pub fn kappa_g(&self) -> f64 {
        self.species.mass * self.trap.radial_frequency.powi(2)
    }

    /// κ_r = κ_g α_r/α_g.
    pub fn kappa_r(&self) -> f64 {
        self.kappa_g() * self.trap.polarizability_ratio
    }

    /// Magnitude of the differential force at the sagged cloud position.
    pub fn differential_force(&self) -> f64 {
        differential_force(self.species.mass, self.trap.gravity, self.trap.polarizability_ratio)
    }
}

/// Scales derived from an [`ExperimentConfig`].
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedScales {
    pub sigma_v: f64,
    pub sigma_k: f64,
    pub lambda_db: f64,
    pub sigma_x: f64,
    pub sag: f64,
    pub w_r: f64,
    pub kappa_g: f64,
    pub kappa_r: f64,
    pub force: f64,
    pub rho0: f64,
    pub psd: f64,
}

/// Thermal rms velocity σ_v = √(k_B T/m).
pub fn thermal_velocity(temperature: f64, mass: f64) -> f64 {
    (K_B * temperature / mass).sqrt()
}

/// Thermal de Broglie wavelength λ_dB = ħ√(2π/(m k_B T)).
pub fn de_broglie_wavelength(temperature: f64, mass: f64) -> f64 {
    HBAR * (2.0 * PI / (mass * K_B * temperature)).sqrt()
}

/// Radius of the transferred part of the cloud, (1/4σ_x² + 1/w²)^(−1/2).
pub fn transferred_radius(sigma_x: f64, waist: f64) -> f64 {
    let inv = 1.0 / (4.0 * sigma_x * sigma_x) + 1.0 / (waist * waist);
    inv.sqrt().recip()
}

/// F = m g |1 − α_r/α_g|.
pub fn differential_force(mass: f64, gravity: f64, polarizability_ratio: f64) -> f64 {
    mass * gravity * (1.0 - polarizability_ratio).abs()
}

/// Harmonic oscillator length √(ħ/mω).
pub fn oscillator_length(mass: f64, omega: f64) -> f64 {
    (HBAR / (mass * omega)).sqrt()
}

pub fn derive_scales(cfg: &ExperimentConfig) -> Result<DerivedScales> {
    cfg.validate()?;
    let t = cfg.ensemble.temperature;
    if !(t > 0.0) {
        return Err(Error::invalid("derived thermal scales need T > 0"));
    }
    let omega = cfg.trap.radial_frequency;
    if !(omega > 0.0) {
        return Err(Error::invalid("sag and σ_x need a nonzero trap frequency"));
    }
    let m = cfg.species.mass;
    let sigma_v = thermal_velocity(t, m);
    let lambda_db = de_broglie_wavelength(t, m);
    let sigma_x = sigma_v / omega;
    let rho0 = cfg.ensemble.atom_number
        / (2.0 * PI * sigma_x * sigma_x * cfg.ensemble.medium_length);
    Ok(DerivedScales {
        sigma_v,
        sigma_k: (2.0 * PI).sqrt() / lambda_db,
        lambda_db,
        sigma_x,
        sag: cfg.trap.gravity / (omega * omega),
        w_r: transferred_radius(sigma_x, cfg.beams.signal_waist),
        kappa_g: cfg.kappa_g(),
        kappa_r: cfg.kappa_r(),
        force: cfg.differential_force(),
        rho0,
        psd: rho0 * lambda_db.powi(3),
    })
}

/// Net spin-wave wave vector. `lambda_r` is `None` when the beams cancel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinWave {
    pub k_r: f64,
    pub lambda_r: Option<f64>,
}

pub fn spin_wave_wavevector(beams: &BeamGeometry) -> Result<SpinWave> {
    if !(beams.signal_wavelength > 0.0) || !(beams.coupling_wavelength > 0.0) {
        return Err(Error::invalid("wavelengths must be positive"));
    }
    let inv_c = 1.0 / beams.coupling_wavelength;
    let inv_s = 1.0 / beams.signal_wavelength;
    let inv = match beams.geometry {
        Propagation::Counterpropagating => (inv_c - inv_s).abs(),
        Propagation::Copropagating => inv_c + inv_s,
    };
    if inv == 0.0 {
        return Ok(SpinWave {
            k_r: 0.0,
            lambda_r: None,
        });
    }
    Ok(SpinWave {
        k_r: 2.0 * PI * inv,
        lambda_r: Some(1.0 / inv),
    })
}

/// Intensity and photoionization figures for an atom held in a dipole trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapOptics {
    /// W/m²
    pub intensity: f64,
    /// 1/s
    pub pi_rate: f64,
    /// `None` when the cross section vanishes.
    pub pi_lifetime: Option<f64>,
}

/// Peak intensity implied by `depth` (J) for a polarizability in a.u., and the
/// resulting photoionization rate for cross section `cross_section` (m²) at
/// `photon_wavelength` (m).
pub fn trap_optics(
    depth: f64,
    polarizability: f64,
    cross_section: f64,
    photon_wavelength: f64,
) -> Result<TrapOptics> {
    if !(depth > 0.0) || !(polarizability > 0.0) {
        return Err(Error::invalid("depth and polarizability must be positive"));
    }
    if !(cross_section >= 0.0) || !(photon_wavelength > 0.0) {
        return Err(Error::invalid("cross section must be >= 0 and wavelength > 0"));
    }
    let intensity = 2.0 * EPSILON_0 * C * depth / au_to_si(polarizability);
    let photon_energy = 2.0 * PI * HBAR * C / photon_wavelength;
    let pi_rate = cross_section * intensity / photon_energy;
    Ok(TrapOptics {
        intensity,
        pi_rate,
        pi_lifetime: (pi_rate > 0.0).then(|| 1.0 / pi_rate),
    })
}

/// Depth α I₀/(2ε₀c) of a Gaussian trap beam of power `power` (W) and waist
/// `waist` (m), with I₀ = 2P/(πw²).
pub fn gaussian_trap_depth(power: f64, waist: f64, polarizability: f64) -> f64 {
    let i0 = 2.0 * power / (PI * waist * waist);
    au_to_si(polarizability) * i0 / (2.0 * EPSILON_0 * C)
}

/// Radial frequency √(4U/(m w_t²)) at the bottom of a Gaussian trap.
pub fn gaussian_trap_frequency(depth: f64, waist: f64, mass: f64) -> f64 {
    (4.0 * depth / (mass * waist * waist)).sqrt()
}

/// Mixing angle ϑ = atan2(2 g_R √N, Ω_c) in [0, π/2].
pub fn mixing_angle(g_r: f64, atom_number: f64, omega_c: f64) -> Result<f64> {
    if !(omega_c >= 0.0) || !(atom_number >= 0.0) {
        return Err(Error::invalid("Ω_c and N must be >= 0"));
    }
    Ok((2.0 * g_r.abs() * atom_number.sqrt()).atan2(omega_c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::*;

    fn reference_config() -> ExperimentConfig {
        ExperimentConfig {
            species: Species::rb87(),
            beams: BeamGeometry {
                signal_wavelength: 780.24 * NANOMETER,
                coupling_wavelength: 480.0 * NANOMETER,
                geometry: Propagation::Counterpropagating,
                signal_waist: 8.0 * MICROMETER,
            },
            trap: TrapConfig::new(hz_to_angular(96.0), -550.0 / 687.3),
            ensemble: ThermalEnsemble {
                temperature: 0.2 * MICROKELVIN,
                atom_number: 1e4,
                medium_length: 0.40 * MILLIMETER,
            },
        }
    }

    #[test]
    fn reference_scales() {
        let s = derive_scales(&reference_config()).unwrap();
        assert!((s.sigma_x / MICROMETER - 7.0).abs() < 0.35);
        assert!((s.sag / MICROMETER - 27.0).abs() < 0.5);
        let rho_cm3 = s.rho0 * CENTIMETER.powi(3);
        assert!((rho_cm3 / 8e10 - 1.0).abs() < 0.1, "{rho_cm3}");
        assert!((s.psd / 6e-3 - 1.0).abs() < 0.1, "{}", s.psd);
        assert!((s.lambda_db * s.sigma_k - (2.0 * PI).sqrt()).abs() < 1e-14);
        assert!(s.w_r <= 2.0 * s.sigma_x && s.w_r <= 8.0 * MICROMETER);
    }

    #[test]
    fn spin_wave_lengths() {
        let mut b = reference_config().beams;
        let sw = spin_wave_wavevector(&b).unwrap();
        assert!((sw.lambda_r.unwrap() / MICROMETER - 1.247).abs() < 0.001);
        b.geometry = Propagation::Copropagating;
        let co = spin_wave_wavevector(&b).unwrap();
        // 1/(1/780.24 + 1/480) nm
        assert!((co.lambda_r.unwrap() / NANOMETER - 297.18).abs() < 0.05);
        b.geometry = Propagation::Counterpropagating;
        b.coupling_wavelength = b.signal_wavelength;
        let d = spin_wave_wavevector(&b).unwrap();
        assert_eq!(d.k_r, 0.0);
        assert!(d.lambda_r.is_none());
    }

    #[test]
    fn rydberg_polarizability_near_quoted() {
        let sp = Species::rb87();
        let a1064 = sp.rydberg_polarizability(1064.0 * NANOMETER);
        let a532 = sp.rydberg_polarizability(532.0 * NANOMETER);
        assert!((a1064 / -550.0 - 1.0).abs() < 0.02, "{a1064}");
        assert!((a532 / -140.0 - 1.0).abs() < 0.04, "{a532}");
    }

    #[test]
    fn polarizability_ratios() {
        let r1064 = (1.0f64 - (-550.0 / 687.3)).abs();
        let r532 = (1.0f64 - (-140.0 / -250.0)).abs();
        assert!((r1064 / 1.8 - 1.0).abs() < 0.03);
        assert!((r532 / 0.45 - 1.0).abs() < 0.03);
    }

    #[test]
    fn photoionization() {
        let o = trap_optics(K_B * 18.0 * MICROKELVIN, 687.3, 1.2 * PICOMETER_SQ, 1064.0 * NANOMETER)
            .unwrap();
        let life = o.pi_lifetime.unwrap();
        assert!((life / MILLISECOND - 1.3).abs() < 0.13, "{life}");
        let zero = trap_optics(K_B * 18e-6, 687.3, 0.0, 1064e-9).unwrap();
        assert_eq!(zero.pi_rate, 0.0);
        assert!(zero.pi_lifetime.is_none());
        let doubled = trap_optics(2.0 * K_B * 18e-6, 687.3, 1.2e-24, 1064e-9).unwrap();
        assert!((doubled.pi_rate / o.pi_rate - 2.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_trap_matches_quoted_depth_and_frequency() {
        let depth = gaussian_trap_depth(3.7, 140.0 * MICROMETER, 687.3);
        assert!((depth / K_B / MICROKELVIN - 18.0).abs() < 1.0);
        let f = angular_to_hz(gaussian_trap_frequency(depth, 140.0 * MICROMETER, M_RB87));
        assert!((f - 96.0).abs() < 3.0, "{f}");
    }

    #[test]
    fn mixing_angle_limits() {
        assert!(mixing_angle(1.0, 4.0, f64::MAX).unwrap() < 1e-300);
        assert!((mixing_angle(1.0, 4.0, 0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((mixing_angle(1.0, 4.0, 4.0).unwrap() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_zero_frequency_and_temperature() {
        let mut c = reference_config();
        c.trap.radial_frequency = 0.0;
        assert!(derive_scales(&c).is_err());
        let mut c = reference_config();
        c.ensemble.temperature = 0.0;
        assert!(derive_scales(&c).is_err());
    }

    #[test]
    fn w_r_limits() {
        let w = 8.0 * MICROMETER;
        assert!((transferred_radius(1e3, w) / w - 1.0).abs() < 1e-12);
        assert!((transferred_radius(3e-6, 1e3) / 6e-6 - 1.0).abs() < 1e-12);
    }
}
