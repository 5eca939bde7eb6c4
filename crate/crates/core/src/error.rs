use thiserror::Error;

/// Errors raised by the estimation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid censoring scheme: {0}")]
    Scheme(String),

    #[error("no convergence after {iterations} iterations (last step {last_step:e})")]
    Convergence {
        iterations: usize,
        last_step: f64,
        trajectory: Vec<f64>,
    },

    #[error("singular information matrix (determinant {0:e})")]
    Singular(f64),

    #[error("bootstrap failed: {failed} of {total} replicates dropped")]
    Bootstrap { failed: usize, total: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("lookup failed: {0}")]
    Lookup(String),

    #[error("integrity check failed: {0}")]
    Integrity(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Stable machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Scheme(_) => "scheme",
            Error::Convergence { .. } => "convergence",
            Error::Singular(_) => "singular",
            Error::Bootstrap { .. } => "bootstrap",
            Error::Numerical(_) => "numerical",
            Error::Lookup(_) => "lookup",
            Error::Integrity(_) => "integrity",
            Error::Config(_) => "config",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
