//! Scale factors between SI and the units used at the CLI boundary.
//!
//! Multiply a value in the named unit by the constant to get SI; divide to go
//! back.

use crate::constants::AU_POLARIZABILITY;

pub const MICROKELVIN: f64 = 1e-6;
pub const MICROSECOND: f64 = 1e-6;
pub const MILLISECOND: f64 = 1e-3;
pub const MICROMETER: f64 = 1e-6;
pub const MILLIMETER: f64 = 1e-3;
pub const NANOMETER: f64 = 1e-9;
pub const CENTIMETER: f64 = 1e-2;
pub const MILLIWATT: f64 = 1e-3;
pub const PICOMETER_SQ: f64 = 1e-24;

/// Angular frequency (rad/s) from a frequency in Hz.
pub fn hz_to_angular(f: f64) -> f64 {
    2.0 * std::f64::consts::PI * f
}

/// Frequency in Hz from an angular frequency.
pub fn angular_to_hz(omega: f64) -> f64 {
    omega / (2.0 * std::f64::consts::PI)
}

/// Polarizability in SI from atomic units.
pub fn au_to_si(alpha_au: f64) -> f64 {
    alpha_au * AU_POLARIZABILITY
}

/// Polarizability in atomic units from SI.
pub fn si_to_au(alpha_si: f64) -> f64 {
    alpha_si / AU_POLARIZABILITY
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let f = 96.0;
        assert!((angular_to_hz(hz_to_angular(f)) - f).abs() < 1e-12);
        let a = 687.3;
        assert!((si_to_au(au_to_si(a)) - a).abs() / a < 1e-14);
    }
}
