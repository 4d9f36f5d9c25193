use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or out-of-contract arguments.
    #[error("input error: {0}")]
    Input(String),
    /// Well-formed arguments for which the quantity is undefined.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical route failed its own consistency check.
    #[error("numerical error: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Process exit status used by the `bdent` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) => crate::cli::EXIT_INPUT,
            Error::Domain(_) | Error::Numerical(_) => crate::cli::EXIT_DOMAIN,
        }
    }
}
