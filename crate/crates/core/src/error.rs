use thiserror::Error;

/// Errors raised by the chain builders, special functions and propagators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid photon-number window [{lo}, {hi}]: {reason}")]
    InvalidWindow { lo: i64, hi: i64, reason: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("input not normalized: squared norm {squared_norm} deviates from 1 by more than {tolerance:e}")]
    Normalization { squared_norm: f64, tolerance: f64 },

    #[error("{function} argument out of domain: {detail}")]
    Domain { function: &'static str, detail: String },

    #[error("shape mismatch: expected window (offset {expected_offset}, len {expected_len}), got (offset {offset}, len {len})")]
    Shape {
        expected_offset: i64,
        expected_len: usize,
        offset: i64,
        len: usize,
    },

    #[error("eigensolver did not converge for eigenvalue {index} after {iterations} QL sweeps (off-diagonal {residual:e})")]
    NoConvergence {
        index: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("time step {dt} exceeds the accuracy bound {bound} for this schedule")]
    Accuracy { dt: f64, bound: f64 },

    #[error("operation requires a {expected} schedule")]
    ScheduleVariant { expected: &'static str },

    #[error("window does not contain the support of the Wannier-Stark state m = {m}: edge amplitude {edge_amplitude:e}")]
    Support { m: i64, edge_amplitude: f64 },

    #[error("time grid: {0}")]
    TimeGrid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
