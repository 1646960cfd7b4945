use thiserror::Error;

/// Errors raised by the arithmetic, group and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^31")]
    NotPrime(u64),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("zero vector is not allowed here")]
    ZeroVector,

    #[error("{what} exceeded cap {cap} (reached {reached})")]
    CapExceeded {
        what: &'static str,
        cap: u64,
        reached: u64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn cap(what: &'static str, cap: u64, reached: u64) -> Self {
        Error::CapExceeded { what, cap, reached }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
