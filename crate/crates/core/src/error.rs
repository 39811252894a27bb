use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A value lies outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// Sizes or indices do not line up.
    #[error("shape error: {0}")]
    Shape(String),

    #[error("power iteration did not converge after {iterations} iterations (last change {last_delta:e})")]
    Convergence { iterations: usize, last_delta: f64 },

    /// A line through two points with equal abscissae was requested.
    #[error("degenerate linear map: both anchor points have abscissa {0}")]
    DegenerateMap(f64),

    #[error("credibility values are not ordered h >= m >= l with h > l: ({h}, {m}, {l})")]
    CredibilityOrder { h: f64, m: f64, l: f64 },

    #[error("cannot summarize an empty record set")]
    EmptyReport,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }
}
