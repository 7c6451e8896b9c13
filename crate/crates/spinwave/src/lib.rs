//! Dark-time decay of the retrieval efficiency η(t) for light stored as an
//! atomic spin wave.
//!
//! The crate is organised in layers:
//!
//! * [`physics`]: constants, unit handling and the scalar scales of a cold
//!   Rydberg-EIT ensemble (thermal widths, gravitational sag, trap optics).
//! * [`models`]: closed-form η(t)/η₀ for every decay mechanism, plus
//!   composition rules.
//! * [`oracle`]: a 1D split-operator propagator, the Hermite-basis closed form
//!   for release from a harmonic trap, and the exact Kuhr overlap sum.
//! * [`ramsey`]: Ramsey fringes, visibility and first-order coherence.
//! * [`fit`]: decay-curve fits and the 1/τ² versus T regression.
//!
//! Everything is SI internally. [`units`] holds the conversion factors used at
//! the edges.

pub mod constants;
pub mod error;
pub mod fit;
pub mod models;
pub mod oracle;
pub mod physics;
pub mod quad;
pub mod ramsey;
pub mod units;

pub use error::{Error, Result};
pub use models::{CoherenceSeries, DecayCurve, Timescale, Warning};
