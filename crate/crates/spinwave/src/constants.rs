//! Physical constants (CODATA 2018) and species data in SI units.

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;
/// Vacuum permittivity, F/m.
pub const EPSILON_0: f64 = 8.854_187_812_8e-12;
/// Speed of light, m/s.
pub const C: f64 = 299_792_458.0;
/// Elementary charge, C.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Electron mass, kg.
pub const M_ELECTRON: f64 = 9.109_383_701_5e-31;
/// Mass of ⁸⁷Rb, kg.
pub const M_RB87: f64 = 1.443_160_000_0e-25;
/// One atomic unit of polarizability, J/(V/m)².
pub const AU_POLARIZABILITY: f64 = 1.649e-41;
/// Default gravitational acceleration, m/s².
pub const G_DEFAULT: f64 = 9.8;
