//! Covariant quantum error-correcting codes built from random unitaries.
//!
//! The crate is organised bottom-up: [`tensor`] supplies dense operators on
//! qudit registers, [`symmetry`] the U(1) and SU(d) representation theory,
//! [`codes`] the random covariant encoders, [`erasure`] the complementary
//! channel and its error metrics, [`minentropy`] the conditional min-entropy
//! machinery behind the decoupling bounds, and [`experiments`] the
//! configuration-driven runner used by the `covqec` binary.

pub mod codes;
pub mod container;
pub mod erasure;
pub mod error;
pub mod experiments;
pub mod minentropy;
pub mod special;
pub mod symmetry;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
