//! Derived tensor and derived Hom, computed on the semifree replacement and
//! reported inside an honest certified window.

use std::collections::BTreeMap;

use crate::dg::algebra::DGAlgebraMorphism;
use crate::dg::hom::hom_dg;
use crate::dg::module::DGModule;
use crate::dg::tensor::{tensor_change, TensorChange};
use crate::error::Error;
use crate::graded::Degree;
use crate::resolutions::builder::{build_resolution, Resolution};

/// `V (x)^L_D E` at a chosen depth: the change of algebras applied to the
/// resolution total, with the inherited stabilization certificate.
#[derive(Clone, Debug)]
pub struct DerivedTensor {
    pub resolution: Resolution,
    pub change: TensorChange,
    pub window_lo: Degree,
    /// Cohomology dimensions of the tensored total (all degrees).
    pub h_dims: BTreeMap<Degree, usize>,
    /// Degrees where depth n and n+1 agree inside the window.
    pub stabilization: bool,
}

impl DerivedTensor {
    pub fn module(&self) -> &DGModule {
        &self.change.module
    }

    pub fn certified(&self, k: Degree) -> bool {
        k >= self.window_lo && self.stabilization
    }
}

pub fn derived_tensor(
    v: &DGModule,
    eps: &DGAlgebraMorphism,
    depth: usize,
) -> Result<DerivedTensor, Error> {
    let resolution = build_resolution(v, depth)?;
    let tc = tensor_change(eps, &resolution.total)?;
    let tc_next = tensor_change(eps, &resolution.total_next)?;
    // The extra column only touches degrees below
    // top(V) - (n+1) + top(E); raise the window accordingly.
    let top_e = eps.target.carrier().space().max_degree().unwrap_or(0);
    let window_lo = resolution.window_lo + top_e;
    let h_n = tc.module.carrier().cohomology();
    let h_n1 = tc_next.module.carrier().cohomology();
    let mut stabilization = true;
    let degs: std::collections::BTreeSet<Degree> =
        h_n.dims.keys().chain(h_n1.dims.keys()).copied().filter(|&k| k >= window_lo).collect();
    for k in degs {
        if h_n.dim(k) != h_n1.dim(k) {
            stabilization = false;
        }
    }
    Ok(DerivedTensor {
        resolution,
        change: tc,
        window_lo,
        h_dims: h_n.dims,
        stabilization,
    })
}

/// One entry of a derived-Hom dimension table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomEntry {
    pub dim: usize,
    pub certified: bool,
}

/// A derived-Hom table over a degree range; entries outside the certified
/// window are flagged, never silently returned.
#[derive(Clone, Debug)]
pub struct DerivedHomTable {
    pub entries: BTreeMap<Degree, HomEntry>,
}

impl DerivedHomTable {
    pub fn dims_where_certified(&self) -> BTreeMap<Degree, usize> {
        self.entries.iter().filter(|(_, e)| e.certified).map(|(&k, e)| (k, e.dim)).collect()
    }
}

/// `derived_hom_dims`: `dim H^i(hom(P_total, W))` for `i` in the range.
/// An entry is certified when depths n and n+1 agree and `i` is below the
/// sound bound `min(W) - top(V) + n - 1`.
pub fn derived_hom_dims(
    v: &DGModule,
    w: &DGModule,
    range: (Degree, Degree),
    depth: usize,
) -> Result<DerivedHomTable, Error> {
    let resolution = build_resolution(v, depth)?;
    derived_hom_dims_with(&resolution, w, range)
}

/// Same, reusing an existing resolution of the source.
pub fn derived_hom_dims_with(
    resolution: &Resolution,
    w: &DGModule,
    range: (Degree, Degree),
) -> Result<DerivedHomTable, Error> {
    let hom_n = hom_dg(&resolution.total, w)?;
    let hom_n1 = hom_dg(&resolution.total_next, w)?;
    let h_n = hom_n.complex.cohomology();
    let h_n1 = hom_n1.complex.cohomology();
    let top_v = resolution.module.carrier().space().max_degree();
    let min_w = w.carrier().space().min_degree();
    let bound = match (top_v, min_w) {
        (Some(t), Some(m)) => Some(m - t + resolution.depth as i64 - 1),
        // An empty side makes every hom group zero; certify freely.
        _ => None,
    };
    let mut entries = BTreeMap::new();
    for i in range.0..=range.1 {
        let dim = h_n.dim(i);
        let stable = dim == h_n1.dim(i);
        let in_bound = bound.is_none_or(|b| i <= b);
        entries.insert(i, HomEntry { dim, certified: stable && in_bound });
    }
    Ok(DerivedHomTable { entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::examples::{augmentation_module, augmentation_morphism, delta, lambda};
    use crate::morphism::is_quasi_iso;

    #[test]
    fn derived_tensor_of_free_is_the_target() {
        // V = D: the derived tensor along eps: D -> Q is quasi-isomorphic
        // to Q via id (x) eps.
        let d = delta();
        let eps = augmentation_morphism(&d).unwrap();
        let v = DGModule::regular(&d).unwrap();
        let dt = derived_tensor(&v, &eps, 2).unwrap();
        assert!(dt.stabilization);
        // H of the result in the window: one dimension in degree 0, like Q.
        for (&k, &dim) in &dt.h_dims {
            if k >= dt.window_lo {
                assert_eq!(dim, usize::from(k == 0), "degree {k}");
            }
        }
    }

    #[test]
    fn derived_tensor_of_kprojective_short_circuits() {
        // For a free module the plain change of algebras is already right:
        // compare cohomology in the window.
        let d = delta();
        let eps = augmentation_morphism(&d).unwrap();
        let v = DGModule::regular(&d).unwrap();
        let dt = derived_tensor(&v, &eps, 2).unwrap();
        let plain = crate::dg::tensor::tensor_change(&eps, &v).unwrap();
        let h_plain = plain.module.carrier().cohomology();
        for (&k, &dim) in &dt.h_dims {
            if k >= dt.window_lo {
                assert_eq!(dim, h_plain.dim(k), "degree {k}");
            }
        }
        // And the augmentation itself is a quasi-isomorphism on totals.
        let aug = dt.resolution.augmentation.as_chain_map().unwrap();
        assert!(is_quasi_iso(&aug).iso_from(dt.resolution.window_lo));
    }

    #[test]
    fn derived_hom_from_free_is_cohomology_of_target() {
        // dim Hom_derived(D, W)[i] = dim H^i(W).
        let d = delta();
        let v = DGModule::regular(&d).unwrap();
        let w = augmentation_module(&d).unwrap();
        let table = derived_hom_dims(&v, &w, (-2, 2), 2).unwrap();
        let h_w = w.carrier().cohomology();
        for (&i, e) in &table.entries {
            if e.certified {
                assert_eq!(e.dim, h_w.dim(i), "degree {i}");
            }
        }
        assert!(table.entries[&0].certified);
        assert_eq!(table.entries[&0].dim, 1);
    }

    #[test]
    fn derived_hom_into_zero_vanishes() {
        let d = delta();
        let v = augmentation_module(&d).unwrap();
        let zero = DGModule::new(
            "0",
            d.clone(),
            crate::complex::Complex::zero(),
            (0..d.dim())
                .map(|i| {
                    crate::morphism::GradedMorphism::zero(
                        d.basis().degree(i),
                        crate::graded::GradedSpace::empty(),
                        crate::graded::GradedSpace::empty(),
                    )
                })
                .collect(),
        )
        .unwrap();
        let table = derived_hom_dims(&v, &zero, (-2, 2), 2).unwrap();
        for e in table.entries.values() {
            assert_eq!(e.dim, 0);
            assert!(e.certified);
        }
    }

    #[test]
    fn koszul_pattern_over_lambda_small_depth() {
        // Over the exterior algebra the derived homs of the augmentation
        // module against itself live in even degrees.
        let l = lambda();
        let v = augmentation_module(&l).unwrap();
        let table = derived_hom_dims(&v, &v, (0, 3), 5).unwrap();
        assert_eq!(table.entries[&0], HomEntry { dim: 1, certified: true });
        assert_eq!(table.entries[&1], HomEntry { dim: 0, certified: true });
        assert_eq!(table.entries[&2], HomEntry { dim: 1, certified: true });
        assert_eq!(table.entries[&3], HomEntry { dim: 0, certified: true });
    }
}
