//! Resolution machinery: homotopy extension over cones, the filtered
//! null-homotopy construction, the iterative resolution builder, derived
//! functors in certified windows, sampled K-projectivity and the
//! equivalence verifier.

pub mod builder;
pub mod derived;
pub mod equivalence;
pub mod filtered;
pub mod homotopy_ext;
pub mod kproj;

pub use builder::{build_resolution, Resolution};
pub use derived::{derived_hom_dims, derived_tensor};
pub use equivalence::verify_equivalence;
pub use filtered::{filtered_null_homotopy, FilteredDGModule};
pub use homotopy_ext::extend_homotopy_over_cone;
pub use kproj::kprojective_property_test;
