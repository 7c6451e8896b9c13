//! First-principles numerical oracles: a 1D split-operator propagator for the
//! per-state overlaps Q_n(t), M_n(t), the Hermite-basis closed form for
//! release from a harmonic trap, and the exact Kuhr overlap sum.
//!
//! Everything is one-dimensional; 2D results are products of 1D runs.

pub mod closed_form;
pub mod grid;
pub mod kuhr_exact;
pub mod propagate;
pub mod scenarios;
pub mod thermal;

pub use closed_form::{hermite_release_closedform, hermite_release_thermal, ReleaseOverlap};
pub use grid::{hermite_state, hermite_states, Grid1D, GridState};
pub use kuhr_exact::{kuhr_exact, KuhrExact, OverlapMethod};
pub use propagate::{Overlaps, PropagationOptions, Potential, Propagator, StorageOperator};
pub use scenarios::Comparison;
pub use thermal::{bec_efficiency, thermal_efficiency, weighted_coherence, ThermalSpec};
