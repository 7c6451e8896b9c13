//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain of the requested operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The grid cannot represent the requested state.
    #[error("grid too small: need half-extent >= {required_half_extent:.4e} m and dx <= {required_dx:.4e} m (have {half_extent:.4e} m, {dx:.4e} m)")]
    GridTooSmall {
        required_half_extent: f64,
        required_dx: f64,
        half_extent: f64,
        dx: f64,
    },

    /// The thermal occupation beyond `n_max` exceeds the requested bound.
    #[error("thermal tail {tail:.3e} exceeds bound {bound:.3e}; need n_max >= {required_n_max}")]
    TailBound {
        tail: f64,
        bound: f64,
        required_n_max: usize,
    },

    /// Norm drift during propagation.
    #[error("norm drift {drift:.3e} after {steps} steps exceeds {limit:.1e}")]
    NormDrift { drift: f64, steps: usize, limit: f64 },

    /// Adaptive quadrature did not reach the requested tolerance.
    #[error("quadrature did not converge: achieved relative error {achieved:.3e}, requested {requested:.1e}")]
    Quadrature { achieved: f64, requested: f64 },

    /// Closed-form Hermite sum too ill-conditioned for the requested accuracy.
    #[error("closed form unstable at n = {n}: estimated relative error {estimate:.3e} exceeds {limit:.1e}")]
    Unstable { n: usize, estimate: f64, limit: f64 },

    /// Other numerical failure (overflow, singular system).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Fit could not be performed or did not converge.
    #[error("fit failed: {0}")]
    Fit(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
