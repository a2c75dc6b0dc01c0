use thiserror::Error;

use crate::exactla::LinAlgError;
use crate::extalg::ExtAlgError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    LinAlg(#[from] LinAlgError),
    #[error(transparent)]
    ExtAlg(#[from] ExtAlgError),
    #[error("invalid polarization type: {0}")]
    InvalidType(String),
    #[error("operation needs a single-factor variety")]
    NotSingleFactor,
    #[error("operation needs a two-factor variety")]
    NotTwoFactors,
    #[error("classes or morphisms live on different varieties")]
    VarietyMismatch,
    #[error("{what} is limited to g <= {limit}, got g = {g}")]
    DimensionGuard {
        what: &'static str,
        limit: usize,
        g: usize,
    },
    #[error("morphism is not an isogeny (determinant zero)")]
    NotIsogeny,
    #[error("pullback of the target polarization does not match the source polarization")]
    PolarizationMismatch,
    #[error("correspondence is not invertible")]
    NotInvertible,
    #[error("sl2 bracket relation violated: {0}")]
    BracketViolation(String),
    #[error("module does not decompose into lowest-weight blocks: {0}")]
    NotDecomposable(String),
    #[error("negative lowest weight lambda = {0}")]
    NegativeLambda(i64),
    #[error("matrix is not of a supported closed-form shape")]
    UnsupportedShape,
    #[error("not an element of SL2(Q): {0}")]
    NotSpecialLinear(String),
    #[error("vector is not homogeneous for H")]
    NotHomogeneous,
    #[error("invalid bidegree: {0}")]
    InvalidBidegree(String),
    #[error("generator {0} has no (p, s) bidegree")]
    MissingBidegree(String),
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
