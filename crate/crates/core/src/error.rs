use std::fmt;

/// Which end of a half-line integral failed to settle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// The end toward zero (log coordinate toward minus infinity).
    Lower,
    /// The end toward infinity.
    Upper,
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tail::Lower => f.write_str("lower (r -> 0)"),
            Tail::Upper => f.write_str("upper (r -> infinity)"),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("pole of the gamma function at {re}{im:+}i")]
    Pole { re: f64, im: f64 },

    #[error("{tail} tail of the integrand does not decay (reached log-coordinate {reached:.1})")]
    TailDivergence { tail: Tail, reached: f64 },

    #[error("non-finite integrand value at log-coordinate {at}")]
    NonFinite { at: f64 },

    #[error("integration did not converge: error estimate {error:e} exceeds tolerance {tolerance:e}")]
    Integration { error: f64, tolerance: f64 },

    #[error("unknown identifier: {0}")]
    Lookup(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
