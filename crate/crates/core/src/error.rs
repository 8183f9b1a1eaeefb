use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric (defect {defect:.3e})")]
    NotSymmetric { defect: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not positive definite (lambda_min = {lambda_min:.6e})")]
    NotPositiveDefinite { lambda_min: f64 },
    #[error("constraint {index} is linearly dependent on the others")]
    RankDeficient { index: usize },
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("{0} did not converge")]
    NonConvergence(String),
    #[error("neighborhood violation at iteration {k}: {reason}")]
    Neighborhood { k: usize, reason: String },
    #[error("line search stalled at iteration {k}")]
    LineSearchStall { k: usize },
    #[error("iteration limit {0} reached")]
    MaxIter(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
