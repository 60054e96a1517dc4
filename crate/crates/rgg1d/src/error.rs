//! Error type shared by every module.

use thiserror::Error;

/// Errors produced by parameter validation, domain checks, and the samplers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("n must be >= 1, got {got}")]
    InvalidNodeCount { got: u64 },

    #[error("lambda must be a positive finite rate, got {got}")]
    InvalidRate { got: f64 },

    #[error("r must be a nonnegative finite cutoff, got {got}")]
    InvalidCutoff { got: f64 },

    #[error("T must be a positive finite truncation point, got {got}")]
    InvalidTruncation { got: f64 },

    #[error("N must be >= n, got N={got} with n={n}")]
    InvalidParentCount { got: u64, n: u64 },

    #[error("no spacings: n must be >= 2, got {got}")]
    NoSpacings { got: u64 },

    #[error("index out of range: {what}")]
    IndexOutOfRange { what: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("internal consistency violation: {0}")]
    Consistency(String),

    #[error(
        "acceptance rate too low under connectivity conditioning: \
         {accepted} of {attempts} attempts accepted (needed {required} samples)"
    )]
    LowAcceptanceRate {
        attempts: u64,
        accepted: u64,
        required: u64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
