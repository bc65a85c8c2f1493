//! Homological invariants: Ext-algebras with Yoneda products, Frobenius data, the
//! twisted bimodule resolution and its matrix homomorphisms, `det σ`, `hdet σ`, and
//! the restriction formulas for the twisting map of `E(A ⊗^τ B)`.

mod ext;
mod regular;
mod total;
mod tower;

pub use ext::{frobenius_data, ExtAlgebra, FrobeniusData};
pub use regular::{as_regular_report, AsRegularReport, AsRegularity};
pub use total::{tau_e_restrictions, total_complex, TauEReport, TotalComplex};
pub use tower::{build_phi_tower, det_sigma, hdet, PhiTower};

use crate::resolution::ResolutionError;
use crate::twist::TwistError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HomalgError {
    #[error(transparent)]
    Resolution(#[from] ResolutionError),
    #[error(transparent)]
    Twist(#[from] TwistError),
    #[error("resolution is not pure: V_{position} has several degrees")]
    NotPure { position: usize },
    #[error("not AS-regular within bounds: {0}")]
    NotRegular(String),
    #[error("degenerate pairing between E^{position} and its complement")]
    Degenerate { position: usize },
    #[error("no solution for φ_{position} at generator {generator}")]
    Inconsistent { position: usize, generator: usize },
    #[error("the first differential of the resolution of B is not d(e_j) = y_j")]
    FirstDifferential,
    #[error("{0}")]
    Shape(String),
}
