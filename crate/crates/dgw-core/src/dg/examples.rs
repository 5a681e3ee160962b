//! Small stock DG algebras and modules used across tests, the corpus and
//! the acceptance suite.

use std::collections::BTreeMap;

use crate::complex::Complex;
use crate::dg::algebra::{DGAlgebra, DGAlgebraMorphism, Elem};
use crate::dg::module::DGModule;
use crate::error::Error;
use crate::graded::{DegreeData, GradedSpace};
use crate::linalg::{rat, Mat};
use crate::morphism::GradedMorphism;

fn unlabeled(deg: i64, labels: &[&str]) -> (i64, DegreeData) {
    (
        deg,
        DegreeData {
            dim: labels.len(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
            weights: None,
        },
    )
}

/// The square-zero acyclic augmented algebra: basis 1, y in degree 0 and x
/// in degree -1, with dx = y and all products of non-unit elements zero.
/// Its cohomology is the ground field in degree 0.
pub fn delta() -> DGAlgebra {
    let mut space = BTreeMap::new();
    let (k, d) = unlabeled(-1, &["x"]);
    space.insert(k, d);
    let (k, d) = unlabeled(0, &["one", "y"]);
    space.insert(k, d);
    let space = GradedSpace::new(space).unwrap();
    let mut diff = BTreeMap::new();
    // x |-> y; degree 0 basis order is (one, y).
    diff.insert(-1, Mat::from_rows(vec![vec![rat(0)], vec![rat(1)]]).unwrap());
    let carrier = Complex::new(space, diff).unwrap();
    // Flat order: x (deg -1), one, y (deg 0). Unit is flat index 1.
    let unit = 1usize;
    let n = 3usize;
    let mut mul: Vec<Vec<Elem>> = vec![vec![Vec::new(); n]; n];
    for j in 0..n {
        mul[unit][j] = vec![(j, rat(1))];
        mul[j][unit] = vec![(j, rat(1))];
    }
    DGAlgebra::new("Delta", carrier, unit, mul, None).unwrap()
}

/// The exterior algebra on one generator of degree -1, zero differential.
pub fn lambda() -> DGAlgebra {
    let mut space = BTreeMap::new();
    let (k, d) = unlabeled(-1, &["x"]);
    space.insert(k, d);
    let (k, d) = unlabeled(0, &["one"]);
    space.insert(k, d);
    let space = GradedSpace::new(space).unwrap();
    let carrier = Complex::new(space, BTreeMap::new()).unwrap();
    // Flat order: x (deg -1), one (deg 0). Unit is flat index 1.
    let unit = 1usize;
    let n = 2usize;
    let mut mul: Vec<Vec<Elem>> = vec![vec![Vec::new(); n]; n];
    for j in 0..n {
        mul[unit][j] = vec![(j, rat(1))];
        mul[j][unit] = vec![(j, rat(1))];
    }
    DGAlgebra::new("Lambda", carrier, unit, mul, None).unwrap()
}

/// The one-dimensional module where every non-unit basis element acts as
/// zero. Valid over algebras whose augmentation ideal kills it (all stock
/// algebras here).
pub fn augmentation_module(algebra: &DGAlgebra) -> Result<DGModule, Error> {
    let carrier = Complex::new(GradedSpace::from_dims(&[(0, 1)]), BTreeMap::new())?;
    let mut action = Vec::new();
    for i in 0..algebra.dim() {
        if i == algebra.unit() {
            action.push(GradedMorphism::identity(carrier.space()));
        } else {
            action.push(GradedMorphism::zero(
                algebra.basis().degree(i),
                carrier.space().clone(),
                carrier.space().clone(),
            ));
        }
    }
    DGModule::new(format!("{}-aug", algebra.name), algebra.clone(), carrier, action)
}

/// The augmentation morphism onto the ground field: unit to 1, all other
/// basis elements to 0.
pub fn augmentation_morphism(algebra: &DGAlgebra) -> Result<DGAlgebraMorphism, Error> {
    let q = DGAlgebra::ground_field();
    let mut mats = BTreeMap::new();
    for (k, data) in algebra.carrier().space().iter() {
        let rows = if k == 0 { 1 } else { 0 };
        let mut m = Mat::zeros(rows, data.dim);
        if k == 0 {
            let (_, unit_idx) = algebra.basis().unflat(algebra.unit());
            m.set(0, unit_idx, rat(1));
        }
        mats.insert(k, m);
    }
    DGAlgebraMorphism::new(algebra.clone(), q, mats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn augmentation_morphism_of_delta_is_quasi_iso() {
        let eps = augmentation_morphism(&delta()).unwrap();
        assert!(eps.quasi_iso);
    }

    #[test]
    fn augmentation_morphism_of_lambda_is_not_quasi_iso() {
        let eps = augmentation_morphism(&lambda()).unwrap();
        assert!(!eps.quasi_iso);
    }
}
