use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),

    #[error("vertex {0:?} lies outside the box")]
    OutsideBox(Vec<i64>),

    #[error("malformed path: {0}")]
    MalformedPath(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("oracle limit exceeded: {0}")]
    OracleLimit(String),

    #[error("arithmetic overflow in exact mode: {0}")]
    Overflow(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("hard assertion failed: {0}")]
    Assertion(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
