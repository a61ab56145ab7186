//! Error types shared across the algebra modules.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("variable arity mismatch: expected {expected}, found {found}")]
pub struct ArityError {
    pub expected: usize,
    pub found: usize,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error(transparent)]
    Arity(#[from] ArityError),
    #[error("operands carry different twists")]
    TwistMismatch,
    #[error("twisted operator has no canonical action on polynomials")]
    NoCanonicalAction,
    #[error("coefficient kinds do not match: {0}")]
    CoeffMismatch(String),
    #[error("cochain takes {expected} arguments, got {found}")]
    ArgCount { expected: usize, found: usize },
    #[error("bar word length {length} exceeds cap {cap}")]
    BarOverflow { length: usize, cap: usize },
}
