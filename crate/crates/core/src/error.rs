use thiserror::Error;

/// Failures surfaced by the numerical routines, attributed to the stage that
/// produced them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{stage}: quadrature did not converge (value {value:e}, error estimate {error:e})")]
    NonConvergence { stage: String, value: f64, error: f64 },

    #[error("{stage}: truncated integrals do not stabilize as the excision shrinks")]
    Divergence { stage: String },

    #[error("{stage}: no sign change of H(α) on [{lo}, {hi}]")]
    NoBracket { stage: String, lo: f64, hi: f64 },

    #[error("inconsistent results: {0}")]
    Inconsistency(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    /// Prefixes the stage of a numerical failure with `outer`.
    pub fn within(self, outer: &str) -> Self {
        match self {
            Error::NonConvergence { stage, value, error } => Error::NonConvergence {
                stage: format!("{outer}/{stage}"),
                value,
                error,
            },
            Error::Divergence { stage } => Error::Divergence {
                stage: format!("{outer}/{stage}"),
            },
            Error::NoBracket { stage, lo, hi } => Error::NoBracket {
                stage: format!("{outer}/{stage}"),
                lo,
                hi,
            },
            other => other,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
