//! DG algebras, DG modules, change of algebras and adjunction data.

pub mod adjunction;
pub mod algebra;
pub mod examples;
pub mod hom;
pub mod module;
pub mod tensor;

pub use algebra::{DGAlgebra, DGAlgebraMorphism};
pub use module::{DGModule, ModuleMap};
