use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("singular curve: discriminant is zero")]
    SingularCurve,
    #[error("bad reduction at p = {0}")]
    BadReduction(u64),
    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),
    #[error("brute-force cap exceeded: {0}")]
    CapExceeded(String),
    #[error("matrix is not invertible mod {0}")]
    NotInvertible(u64),
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("{0} is not coprime to M_E = {1}")]
    NotCoprime(u64, u64),
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),
    #[error("report has no checkpoint series")]
    MissingCheckpoints,
    #[error("divisor {0} was not probed during the census")]
    NotProbed(u64),
    #[error("checkpoint was written for a different configuration")]
    ConfigMismatch,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable variant name, used by the CLI for diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::SingularCurve => "SingularCurve",
            Error::BadReduction(_) => "BadReduction",
            Error::Overflow(_) => "Overflow",
            Error::CapExceeded(_) => "CapExceeded",
            Error::NotInvertible(_) => "NotInvertible",
            Error::OutOfRange(_) => "OutOfRange",
            Error::NotCoprime(..) => "NotCoprime",
            Error::NotSquarefree(_) => "NotSquarefree",
            Error::CorruptCheckpoint(_) => "CorruptCheckpoint",
            Error::MissingCheckpoints => "MissingCheckpoints",
            Error::NotProbed(_) => "NotProbed",
            Error::ConfigMismatch => "ConfigMismatch",
            Error::Parse(_) => "Parse",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
