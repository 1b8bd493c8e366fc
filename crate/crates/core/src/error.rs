use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown candidate id {0}")]
    UnknownCandidate(u32),
    #[error("spearman correlation is undefined: {0}")]
    UndefinedCorrelation(&'static str),
    #[error("selection is infeasible")]
    InfeasibleSelection,
    #[error("baseline utility is zero")]
    ZeroBaseline,
    #[error("oracle enumeration is limited to n <= {max}, got n = {n}")]
    OracleTooLarge { n: usize, max: usize },
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
