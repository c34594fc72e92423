use thiserror::Error;

/// Failure modes shared by every computation in the crate.
///
/// The split between [`Error::Domain`] and [`Error::Numerical`] is load-bearing:
/// the command-line front end maps the first to exit status 1 and the second
/// to exit status 2.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A lattice or mesh is too coarse to represent the requested object.
    #[error("resolution error: {0}")]
    Resolution(String),
    /// A root bracket could not be established.
    #[error("bracket error: {0}")]
    Bracket(String),
    /// An iterative method (quadrature, ODE step control, eigensolver) did not converge.
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }

    /// Process exit status used by the CLI: 1 for bad input, 2 for numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Resolution(_) | Error::Parse(_) | Error::Io(_) => 1,
            Error::Bracket(_) | Error::Numerical(_) => 2,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column()))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
