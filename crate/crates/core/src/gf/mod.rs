//! Exact arithmetic over small finite fields.

mod field;
mod matrix;

pub use field::{field_arith, Elem, FieldOp, FieldSpec};
pub use matrix::{FieldMatrix, RowOp, Rref, MIN_DISTANCE_SPACE_LIMIT};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GfError {
    #[error("no supported field of order {0}")]
    UnsupportedOrder(u32),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("modulus is not monic and irreducible")]
    BadModulus,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("value is not an element of the field")]
    InvalidElement,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is rank deficient (rank {rank} < {rows} rows)")]
    RankDeficient { rank: usize, rows: usize },
    #[error("enumeration of {space} codewords exceeds the limit of {limit}")]
    TooLarge { space: u128, limit: u128 },
    #[error("matrix text: {0}")]
    Parse(String),
}
