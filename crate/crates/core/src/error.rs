use thiserror::Error;

use crate::grassmann::MultiIndex;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("component {component} is not even")]
    OddComponent { component: usize },

    #[error("component {component} has a nilpotent term without generators; it has no vector-field representative")]
    GeneratorFreeNilpotent { component: usize },

    #[error("odd image {index} is not odd")]
    EvenOddImage { index: usize },

    #[error("coefficients attached to {index} must have parity {expected}")]
    ParityMismatch { index: MultiIndex, expected: u8 },

    #[error("generator {index} outside a context of {total} generators")]
    GeneratorOutOfRange { index: usize, total: usize },

    #[error("missing binding for `{0}`")]
    MissingBinding(String),

    #[error("function `{name}` has arity {arity}, used with {found} arguments")]
    ArityMismatch { name: String, arity: usize, found: usize },

    #[error("parse error at {position}: {message}")]
    Parse { position: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
