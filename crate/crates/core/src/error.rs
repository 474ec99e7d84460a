use thiserror::Error;

/// Errors raised by the link model, the solver and the experiment harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("{what} index {index} out of range (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("bit count {bits} is not a multiple of {bits_per_symbol} bits per symbol")]
    BitLength { bits: usize, bits_per_symbol: usize },

    #[error("channel is singular at subcarrier {bin}")]
    SingularChannel { bin: usize },

    #[error("support {support:?} gives a rank-deficient sensing submatrix")]
    RankDeficient { support: Vec<usize> },

    #[error("support {support:?} is degenerate (Gram condition number {condition:.3e})")]
    Degenerate { support: Vec<usize>, condition: f64 },

    #[error("NBI frequency {frequency} outside [0, {n})")]
    FrequencyOutOfRange { frequency: f64, n: usize },

    #[error("window sample {index} is zero")]
    SingularWindow { index: usize },

    #[error("reserved and reliable tone sets overlap at index {index}")]
    ToneOverlap { index: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("gini index is undefined for the zero vector")]
    ZeroVector,

    #[error("{0}")]
    Io(String),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors caused by user-supplied configuration rather than numerics.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
