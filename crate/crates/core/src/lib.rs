//! Two-level quantum Markov semigroups.
//!
//! Bloch-coordinate dynamics of qubit Lindblad generators, the spectral decay
//! of evolved states and the large-deviation rate function of their orthogonal
//! measures.

pub mod deviations;
pub mod error;
pub mod lindblad;
pub mod mat2;
pub mod semigroup;
pub mod verify;

pub use error::{Error, Result};
pub use lindblad::{GKSParams, Generator, GeneratorSpec, YZGenerator};
pub use mat2::{BlochState, ComplexMat2, SuperOp4, C64};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/bloch.md")]
    mod bloch {}
    #[doc = include_str!("../../../book/src/generators.md")]
    mod generators {}
    #[doc = include_str!("../../../book/src/evolution.md")]
    mod evolution {}
    #[doc = include_str!("../../../book/src/deviations.md")]
    mod deviations {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
