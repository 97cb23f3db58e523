use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("frame dimension mismatch: {0} vs {1}")]
    FrameMismatch(usize, usize),
    #[error("degree error: {0}")]
    Degree(String),
    #[error("metric is not positive definite")]
    Metric,
    #[error("coframe is not adapted: {0}")]
    NotAdapted(String),
    #[error("not a G2 structure: {0}")]
    NotAG2Structure(String),
    #[error("G2 structure is not integrable (tau2 != 0)")]
    NotIntegrable,
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("invalid Lie algebra: {0}")]
    InvalidAlgebra(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("operator does not square to zero; cohomology is undefined")]
    NotAComplex,
    #[error("forms do not split along the r direction: {0}")]
    NotACylinderStructure(String),
    #[error("almost complex structure incompatible with the 3-form: {0}")]
    NotCompatible(String),
    #[error("almost complex structure is not integrable (max residual {0})")]
    NotComplex(f64),
    #[error("metric is not conformally balanced (max residual {0})")]
    NotConformallyBalanced(f64),
    #[error("curvature is not of type (1,1): {0}")]
    Type(String),
    #[error("perturbation failed: {0}")]
    Perturbation(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
