use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates a structural invariant (bad shape, negative entry, not PSD, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The polynomial is identically zero where a nonzero one is required.
    #[error("zero polynomial: {0}")]
    ZeroPolynomial(String),

    /// The request needs more oracle calls / subsets / terms than the configured cap.
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A root computation found non-real roots where hyperbolicity requires real ones.
    #[error("hyperbolicity violation: {0}")]
    HyperbolicityViolation(String),

    /// An iterative method did not reach the requested accuracy.
    #[error("not converged: {0}")]
    NotConverged(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::ZeroPolynomial(_) | Error::Io(_) => 2,
            Error::BudgetExceeded(_) => 3,
            Error::HyperbolicityViolation(_) | Error::NotConverged(_) | Error::Numerical(_) => 1,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidInput(format!("malformed JSON: {e}"))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
