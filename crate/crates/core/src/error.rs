use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("chebyshev map input {0} lies outside [-1, 1]")]
    ChaosDomain(f64),

    #[error("invalid map degree {0}: must be at least 2")]
    InvalidDegree(u32),

    #[error("{what}: expected length {expected}, got {actual}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("reference length beta_r = {beta_r} does not divide beta = {beta}")]
    NotDivisible { beta: usize, beta_r: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("no finite threshold: denominator of beta_opt is {0}")]
    NoFiniteThreshold(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("undersampled multisine: {samples_per_period} samples per period for {tones} tones (need at least {required})")]
    Undersampled {
        samples_per_period: usize,
        tones: usize,
        required: usize,
    },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
