use thiserror::Error;

use crate::exterior::{SignedIndex, Stage};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid field spec `{0}`")]
    InvalidField(String),
    #[error("cannot parse `{text}` as an element of {field}")]
    ParseScalar { text: String, field: String },
    #[error("signed index must be nonzero")]
    ZeroIndex,
    #[error("invalid stage ({neg},{pos}): both counts must be positive")]
    InvalidStage { neg: i64, pos: i64 },
    #[error("index {index} is not a symbol of stage {stage}")]
    IndexOutsideStage { index: SignedIndex, stage: Stage },
    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },
    #[error("stage mismatch: {left} vs {right}")]
    StageMismatch { left: Stage, right: Stage },
    #[error("cannot combine primal and dual elements")]
    SideMismatch,
    #[error("degree {degree} exceeds the {symbols} symbols of the stage")]
    DegreeTooLarge { degree: usize, symbols: usize },
    #[error("matrix has shape {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    DimensionMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("coordinate vector is not decomposable (a Pluecker relation fails)")]
    NotDecomposable,
    #[error("stage {stage} is too small: {reason}")]
    StageTooSmall { stage: Stage, reason: String },
    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
    #[error("polynomial is not homogeneous of degree {expected}")]
    NonHomogeneous { expected: usize },
    #[error("permutation is not a bijection: {0}")]
    InvalidPermutation(String),
    #[error("element {0} is not in the ground set")]
    NotInGroundSet(SignedIndex),
    #[error("invalid matroid: {0}")]
    InvalidMatroid(String),
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
