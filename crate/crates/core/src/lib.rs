//! Exact computations for twisted tensor products of connected graded algebras.

pub mod cli;
pub mod exactla;
pub mod freealg;
pub mod galgebra;
pub mod gbasis;
pub mod homalg;
pub mod nakayama;
pub mod resolution;
pub mod twist;
