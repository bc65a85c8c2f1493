//! Exact scalars and linear algebra over a field.

mod echelon;
mod matrix;
mod scalar;
mod sparse;

pub use echelon::{ColumnEchelon, Pushed};
pub use matrix::{LinalgError, Rref, ScalarMatrix, Solution};
pub use scalar::{Scalar, ScalarParseError};
pub use sparse::{Accumulator, SparseVec};
