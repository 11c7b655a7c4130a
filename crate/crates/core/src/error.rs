use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A physical or numerical parameter is out of its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: String, reason: String },

    /// Differential operators are only defined on plain polynomial x Gaussian terms.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// The requested integral diverges at the origin.
    #[error("integrand not integrable at the origin: {0}")]
    Integrability(String),

    /// Adaptive quadrature did not reach its tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Accuracy { estimate: f64, error: f64 },

    #[error("unknown exponent set `{0}`")]
    UnknownBasis(String),

    /// Basis construction failed (fit residual, singular balance, empty set...).
    #[error("basis construction failed: {0}")]
    Construction(String),

    #[error("assembly failed: {0}")]
    Assembly(String),

    /// Every overlap eigenvalue fell below the retention threshold.
    #[error("degenerate basis: all overlap eigenvalues below threshold {threshold:e}")]
    DegenerateBasis { threshold: f64 },

    #[error("eigensolver residual {residual:e} exceeds tolerance {tolerance:e}")]
    SolverAccuracy { residual: f64, tolerance: f64 },

    #[error("dense eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("configuration error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::Parameter { name: name.to_string(), reason: reason.into() }
    }

    pub(crate) fn config(key: &str, reason: impl Into<String>) -> Self {
        Error::Config { key: key.to_string(), reason: reason.into() }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
