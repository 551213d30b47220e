//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Data incompatible with the Hamiltonian reduction (`-v_x = n_t` needs
    /// a zero-mean right-hand side on a periodic box).
    #[error("nonzero mean ({mean:.3e}) in antiderivative input")]
    NonzeroMean { mean: f64 },

    #[error("unstable step at t = {t:.6e}: field `{field}` grew {ratio:.2}x in one step")]
    UnstableStep { t: f64, field: &'static str, ratio: f64 },

    #[error("negative weight: {0}")]
    NegativeWeight(String),

    #[error("incompatible virial spec: {0}")]
    IncompatibleSpec(String),

    #[error("too few records ({0}); central differences need at least 3")]
    TooFewRecords(usize),

    /// Carries the offending sample so a failure can be replayed.
    #[error("coercivity violation at sample {sample}: B = {value:.6e} < {bound:.6e}")]
    CoercivityViolation {
        sample: u64,
        value: f64,
        bound: f64,
        zeta: Vec<f64>,
    },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("config validation error in `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), reason: reason.into() }
    }
}
