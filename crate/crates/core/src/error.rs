use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CurvError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("rank mismatch: expected {expected}, found {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("dimension {0} is outside the supported range {1}..={2}")]
    DimensionOutOfRange(usize, usize, usize),
    #[error("component count {found} does not match n^rank = {expected}")]
    BadLength { expected: usize, found: usize },
    #[error("matrix is not symmetric (defect {0:e})")]
    NotSymmetric(f64),
    #[error("metric is degenerate at this point")]
    Singular,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("point outside the chart domain: {0}")]
    OutsideDomain(String),
    #[error("unknown chart kind `{0}`")]
    UnknownKind(String),
    #[error("empty basis")]
    EmptyBasis,
}

pub type Result<T> = std::result::Result<T, CurvError>;
