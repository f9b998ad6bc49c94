use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZstarError {
    #[error("invalid index: {0}")]
    InvalidIndex(String),
    #[error("divergent value: {0}")]
    DivergentValue(String),
    #[error("not in the sequence domain: {0}")]
    NotInDomain(String),
    #[error("out of domain: {0}")]
    OutOfDomain(String),
    #[error("target below the attainable range: {0}")]
    BelowRange(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("precision insufficient: {0}")]
    PrecisionInsufficient(String),
    #[error("invalid node: {0}")]
    InvalidNode(String),
    #[error("family has unbounded diameter: {0}")]
    UnboundedFamily(String),
    #[error("digit sequence has no periodic tail")]
    NonTerminating,
    #[error("corrupt cache entry: {0}")]
    CorruptCache(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl ZstarError {
    /// Process exit code used by the command-line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            ZstarError::PrecisionInsufficient(_) => 3,
            ZstarError::Parse(_) => 1,
            ZstarError::Io(_) | ZstarError::CorruptCache(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for ZstarError {
    fn from(e: std::io::Error) -> Self {
        ZstarError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, ZstarError>;
