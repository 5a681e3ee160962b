//! Exact-arithmetic workbench for differential graded homological algebra.
//!
//! Everything is computed over the rationals with arbitrary-precision
//! integers; every verdict (cohomology dimension, quasi-isomorphism,
//! homotopy existence, axiom check) is exact, never tolerance-based.

pub mod complex;
pub mod dg;
pub mod cone;
pub mod error;
pub mod graded;
pub mod linalg;
pub mod morphism;
pub mod resolutions;
pub mod total;

pub use error::Error;
