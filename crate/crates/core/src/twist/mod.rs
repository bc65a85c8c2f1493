//! Twisting data `τ = (σ, δ)` and the twisted tensor product `A ⊗^τ B`.

mod action;
mod hom;
mod tensor;

pub use action::TwistedRightAction;
pub use hom::{
    invert_sigma, is_inverse_pair, validate_sigma, DerivationViolation, EntryMatrix, MatrixAlgebraHom, SigmaCertificate,
    SigmaDerivation, SigmaViolation,
};
pub use tensor::{build_twisted_tensor, convolution, invert_twist, InverseTwist, TwistData, TwistedTensorAlgebra};

use crate::freealg::AlphabetError;
use crate::gbasis::GbError;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TwistError {
    #[error("shape: {0}")]
    Shape(String),
    #[error("{what} has degree {found}, expected {expected}")]
    Degree { what: String, expected: u32, found: u32 },
    #[error("degree {needed} needed but the bound is {bound}")]
    Bound { needed: u32, bound: u32 },
    #[error(transparent)]
    Violation(#[from] SigmaViolation),
    #[error(transparent)]
    Derivation(DerivationViolation),
    #[error("not a twisting map: degree {degree} has dimension defect {defect}")]
    NotTwisting { degree: u32, defect: i64 },
    #[error("σ is not invertible")]
    NotInvertible,
    #[error(transparent)]
    Gb(GbError),
    #[error(transparent)]
    Alphabet(AlphabetError),
}

#[cfg(test)]
pub(crate) use tensor::tests::example53;
