//! Sign pattern matrices that allow algebraic positivity.
//!
//! A real matrix is algebraically positive when some real polynomial of it is
//! entrywise positive; equivalently it has a simple real eigenvalue whose left
//! and right eigenvectors are positive. This crate decides the structural
//! conditions on a sign pattern, builds a certified matrix in its qualitative
//! class when the component hypothesis holds, and offers a brute-force oracle.

// `!(x > 0.0)` is deliberate throughout: NaN has to fail sign checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constructions;
mod linalg;
pub mod oracle;
pub mod pattern;
mod precise;
pub mod realizer;
pub mod spectral;
pub mod structure;

use thiserror::Error;

pub use constructions::{ConstructionError, EigenTriple};
pub use pattern::{parse_pattern, PatternError, RealMatrix, Sign, SignPattern};

pub use realizer::{realize, Realization, RealizeError};
pub use spectral::{verify_algebraic_positivity, SpectralError, Verdict, WitnessPolynomial};
pub use structure::StructureError;

/// Any error the library can produce.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Pattern(#[from] PatternError),
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Realize(#[from] RealizeError),
}
