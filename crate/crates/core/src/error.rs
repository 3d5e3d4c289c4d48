use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is rank deficient: rank {rank} < {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("table would hold {needed} entries, cap is {cap}")]
    TableTooLarge { needed: u128, cap: usize },

    #[error("infeasible construction: {0}")]
    Infeasible(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
