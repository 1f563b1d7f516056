//! Bit-packed linear algebra over the field with two elements.

mod matrix;
mod subspace;
pub mod text;
mod vector;

pub use matrix::{BitMatrix, DEFAULT_ORDER_CAP};
pub use subspace::Subspace;
pub use vector::BitVector;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("element order exceeds cap {cap}")]
    OrderCapExceeded { cap: u64 },
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}
