use thiserror::Error;

/// Errors raised by the exponent, field, quadrature, scaling and iteration layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("infeasible delta: {0}")]
    InfeasibleDelta(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resolution error: {0}")]
    Resolution(String),
    #[error("non-finite sample: {0}")]
    NonFinite(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("radius error: {0}")]
    Radius(String),
    #[error("divergent integral: {0}")]
    Divergent(String),
    #[error("quadrature failure: {0}")]
    Quadrature(String),
    #[error("inequality structure violated: {0}")]
    InequalityStructure(String),
    #[error("support error: {0}")]
    Support(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures of the numerics (tolerance unmet, divergence) rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Quadrature(_) | Error::Divergent(_) | Error::NonFinite(_)
        )
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
