use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the operation's domain (zero inverse, dependent
    /// lattice basis, zero vector length, empty expected cell, ...).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A checked inequality or identity did not hold.
    #[error("criterion violated: {0}")]
    Violation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
