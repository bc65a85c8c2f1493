//! Words and homogeneous polynomials in free associative algebras.

mod parse;
mod poly;
mod word;

pub use parse::{generator_word, parse_expr, parse_expr_of_degree, parse_expr_with, ParseError};
pub use poly::{DegreeMismatch, NcPoly};
pub use word::{Alphabet, AlphabetError, Word};
