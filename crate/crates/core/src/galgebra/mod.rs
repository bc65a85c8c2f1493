//! Truncated graded algebras, free modules and module maps.

mod algebra;
mod module;

pub use algebra::GradedAlgebra;
pub use module::{FreeModule, ModuleError, ModuleMap};
