//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge on [{lo}, {hi}]: estimate {value:e}, \
         error {error:e} after {intervals} intervals"
    )]
    Quadrature {
        lo: f64,
        hi: f64,
        value: f64,
        error: f64,
        intervals: usize,
    },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error(
        "insufficient horizon: V reached {reached} < t = {target} after {steps} steps"
    )]
    InsufficientHorizon {
        reached: f64,
        target: f64,
        steps: usize,
    },

    #[error("time step {dt} exceeds stability bound {bound}")]
    Stability { dt: f64, bound: f64 },

    #[error("clipped negative mass {mass:e} at t = {t} exceeds {limit:e}")]
    NegativeMass { t: f64, mass: f64, limit: f64 },

    #[error("non-finite value {value} at {at}")]
    NonFinite { value: f64, at: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{experiment}, phase {phase}: {source}")]
    Phase {
        experiment: String,
        phase: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

/// Checks `0 < alpha < 2`.
pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(domain(format!("alpha = {alpha} outside (0, 2)")))
    }
}

/// Checks `0 < beta < 1`.
pub(crate) fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 {
        Ok(())
    } else {
        Err(domain(format!("beta = {beta} outside (0, 1)")))
    }
}

pub(crate) fn check_finite(value: f64, at: impl FnOnce() -> String) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { value, at: at() })
    }
}
