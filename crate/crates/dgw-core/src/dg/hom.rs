//! The complex of module-linear graded morphisms between two DG modules,
//! and exact solvers for module chain maps and module null-homotopies.
//!
//! Degree-r component: A-linear graded morphisms `f` with
//! `f(x v) = (-1)^{r|x|} x f(v)`; differential
//! `D(f) = d_W f - (-1)^r f d_V`. H^0 is chain maps modulo homotopy.

use std::collections::BTreeMap;

use num::Zero;

use crate::complex::Complex;
use crate::dg::module::{DGModule, ModuleMap};
use crate::error::Error;
use crate::graded::{Degree, DegreeData, GradedSpace};
use crate::linalg::{rat, Mat, Rat};
use crate::morphism::{hom_differential, mor_vars, GradedMorphism, LinSys, MorVars};

/// The hom complex together with the chosen morphism basis of every
/// component, so cocycles can be materialized as actual maps.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub complex: Complex,
    pub bases: BTreeMap<Degree, Vec<GradedMorphism>>,
}

impl HomComplex {
    /// A basis of the chain maps `V -> W` (the degree-0 cocycles).
    pub fn chain_map_cocycles(&self) -> Vec<GradedMorphism> {
        self.cocycles_at(0)
    }

    pub fn cocycles_at(&self, r: Degree) -> Vec<GradedMorphism> {
        let Some(basis) = self.bases.get(&r) else { return Vec::new() };
        let d = self.complex.d_at(r);
        let ker = d.kernel();
        (0..ker.cols())
            .map(|j| {
                let mut acc: Option<GradedMorphism> = None;
                for (i, b) in basis.iter().enumerate() {
                    let c = ker.at(i, j);
                    if c.is_zero() {
                        continue;
                    }
                    let term = b.scale(c);
                    acc = Some(match acc {
                        None => term,
                        Some(a) => a.add(&term).expect("same shape"),
                    });
                }
                acc.unwrap_or_else(|| basis[0].scale(&Rat::zero()))
            })
            .collect()
    }
}

/// Adds the Koszul-signed linearity equations
/// `f(x v) - (-1)^{r |x|} x f(v) = 0` for every non-unit algebra basis
/// element to the system.
fn push_linearity_rows(
    sys: &mut LinSys,
    vars: &MorVars,
    v: &DGModule,
    w: &DGModule,
    r: Degree,
) {
    let alg = v.algebra();
    for x in 0..alg.dim() {
        if x == alg.unit() {
            continue;
        }
        let xd = alg.basis().degree(x);
        let sg: Rat = if (r * xd).rem_euclid(2) == 0 { rat(1) } else { rat(-1) };
        for k in v.carrier().space().support() {
            let rows = w.carrier().dim(k + xd + r);
            let cols = v.carrier().dim(k);
            if rows == 0 || cols == 0 {
                continue;
            }
            let act_v = v.action(x).mat_at(k); // V^k -> V^{k+xd}
            let act_w = w.action(x).mat_at(k + r); // W^{k+r} -> W^{k+r+xd}
            for i in 0..rows {
                for j in 0..cols {
                    let mut row = Vec::new();
                    // (f^{k+xd} . act_v)_{ij}
                    for t in 0..act_v.rows() {
                        if !act_v.at(t, j).is_zero() {
                            if let Some(var) = vars.var(k + xd, i, t) {
                                row.push((var, act_v.at(t, j).clone()));
                            }
                        }
                    }
                    // -(sign) (act_w . f^k)_{ij}
                    for s in 0..act_w.cols() {
                        if !act_w.at(i, s).is_zero() {
                            if let Some(var) = vars.var(k, s, j) {
                                row.push((var, -(act_w.at(i, s) * &sg)));
                            }
                        }
                    }
                    sys.push_row(row, Rat::zero());
                }
            }
        }
    }
}

/// Basis of the space of A-linear graded morphisms of degree r.
pub fn linear_morphism_basis(v: &DGModule, w: &DGModule, r: Degree) -> Vec<GradedMorphism> {
    let vars = mor_vars(v.carrier().space(), w.carrier().space(), r);
    if vars.total == 0 {
        return Vec::new();
    }
    let mut sys = LinSys::new(vars.total);
    push_linearity_rows(&mut sys, &vars, v, w, r);
    sys.kernel_basis()
        .into_iter()
        .map(|vals| vars.to_morphism(r, v.carrier().space(), w.carrier().space(), &vals))
        .collect()
}

fn vectorize(m: &GradedMorphism, vars: &MorVars) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); vars.total];
    for (&k, &(rows, cols, off)) in &vars.blocks {
        let mat = m.mat_at(k);
        for i in 0..rows {
            for j in 0..cols {
                out[off + i * cols + j] = mat.at(i, j).clone();
            }
        }
    }
    out
}

/// `hom_dg(V, W)`: the complex of A-linear graded morphisms.
pub fn hom_dg(v: &DGModule, w: &DGModule) -> Result<HomComplex, Error> {
    if v.algebra() != w.algebra() {
        return Err(Error::structural("hom_dg: modules over different algebras"));
    }
    let (Some(v_min), Some(v_max)) =
        (v.carrier().space().min_degree(), v.carrier().space().max_degree())
    else {
        return Ok(HomComplex { complex: Complex::zero(), bases: BTreeMap::new() });
    };
    let (Some(w_min), Some(w_max)) =
        (w.carrier().space().min_degree(), w.carrier().space().max_degree())
    else {
        return Ok(HomComplex { complex: Complex::zero(), bases: BTreeMap::new() });
    };
    let lo = w_min - v_max;
    let hi = w_max - v_min;
    let mut bases = BTreeMap::new();
    for r in lo..=hi {
        let b = linear_morphism_basis(v, w, r);
        if !b.is_empty() {
            bases.insert(r, b);
        }
    }
    let mut space_data = BTreeMap::new();
    for (&r, b) in &bases {
        space_data.insert(
            r,
            DegreeData {
                dim: b.len(),
                labels: (0..b.len()).map(|i| format!("f{}_{}", r, i)).collect(),
                weights: None,
            },
        );
    }
    let space = GradedSpace::new(space_data)?;
    let mut d = BTreeMap::new();
    for (&r, b) in &bases {
        let Some(next) = bases.get(&(r + 1)) else { continue };
        let next_vars = mor_vars(v.carrier().space(), w.carrier().space(), r + 1);
        let next_mat = Mat::from_fn(next_vars.total, next.len(), |i, j| {
            vectorize(&next[j], &next_vars)[i].clone()
        });
        let mut images = Mat::zeros(next_vars.total, b.len());
        for (j, f) in b.iter().enumerate() {
            let df = hom_differential(v.carrier(), w.carrier(), f)?;
            let vecd = vectorize(&df, &next_vars);
            for (i, c) in vecd.into_iter().enumerate() {
                images.set(i, j, c);
            }
        }
        let coords = next_mat
            .solve_matrix(&images)?
            .ok_or_else(|| Error::structural("hom differential leaves the linear span"))?;
        d.insert(r, coords);
    }
    let complex = Complex::new(space, d)?;
    Ok(HomComplex { complex, bases })
}

/// Basis of module chain maps `V -> W`: A-linear and commuting with d.
pub fn module_chain_map_basis(v: &DGModule, w: &DGModule) -> Result<Vec<GradedMorphism>, Error> {
    if v.algebra() != w.algebra() {
        return Err(Error::structural("modules over different algebras"));
    }
    let vars = mor_vars(v.carrier().space(), w.carrier().space(), 0);
    let mut sys = LinSys::new(vars.total);
    push_linearity_rows(&mut sys, &vars, v, w, 0);
    // d_W f - f d_V = 0.
    for k in v.carrier().space().support() {
        let rows = w.carrier().dim(k + 1);
        let cols = v.carrier().dim(k);
        if cols == 0 {
            continue;
        }
        let dw = w.carrier().d_at(k);
        let dv = v.carrier().d_at(k);
        for i in 0..rows {
            for j in 0..cols {
                let mut row = Vec::new();
                for t in 0..dw.cols() {
                    if !dw.at(i, t).is_zero() {
                        if let Some(var) = vars.var(k, t, j) {
                            row.push((var, dw.at(i, t).clone()));
                        }
                    }
                }
                for s in 0..dv.rows() {
                    if !dv.at(s, j).is_zero() {
                        if let Some(var) = vars.var(k + 1, i, s) {
                            row.push((var, -dv.at(s, j)));
                        }
                    }
                }
                sys.push_row(row, Rat::zero());
            }
        }
    }
    Ok(sys
        .kernel_basis()
        .into_iter()
        .map(|vals| vars.to_morphism(0, v.carrier().space(), w.carrier().space(), &vals))
        .collect())
}

/// Finds an A-linear homotopy for an A-linear degree-0 chain map:
/// `h` of degree -1, module-linear, with `f = d_W h + h d_V`. Absence means
/// the assembled exact system is inconsistent.
pub fn module_null_homotopy(f: &ModuleMap) -> Result<Option<GradedMorphism>, Error> {
    let v = &f.source;
    let w = &f.target;
    let vars = mor_vars(v.carrier().space(), w.carrier().space(), -1);
    let mut sys = LinSys::new(vars.total);
    push_linearity_rows(&mut sys, &vars, v, w, -1);
    for k in v.carrier().space().support() {
        let rows = w.carrier().dim(k);
        let cols = v.carrier().dim(k);
        if rows == 0 || cols == 0 {
            continue;
        }
        let dw = w.carrier().d_at(k - 1);
        let dv = v.carrier().d_at(k);
        let fk = f.mat_at(k);
        for i in 0..rows {
            for j in 0..cols {
                let mut row = Vec::new();
                for t in 0..dw.cols() {
                    if !dw.at(i, t).is_zero() {
                        if let Some(var) = vars.var(k, t, j) {
                            row.push((var, dw.at(i, t).clone()));
                        }
                    }
                }
                for s in 0..dv.rows() {
                    if !dv.at(s, j).is_zero() {
                        if let Some(var) = vars.var(k + 1, i, s) {
                            row.push((var, dv.at(s, j).clone()));
                        }
                    }
                }
                sys.push_row(row, fk.at(i, j).clone());
            }
        }
    }
    let Some(vals) = sys.solve() else { return Ok(None) };
    let h = vars.to_morphism(-1, v.carrier().space(), w.carrier().space(), &vals);
    debug_assert_eq!(
        hom_differential(v.carrier(), w.carrier(), &h).unwrap(),
        *f.morphism()
    );
    Ok(Some(h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::examples::{augmentation_module, delta, lambda};
    use crate::dg::module::{cone_module, DGModule};

    #[test]
    fn hom_from_regular_is_the_module() {
        // Hom_A(A, W) = W via evaluation at 1, degree by degree.
        let a = lambda();
        let reg = DGModule::regular(&a).unwrap();
        let w = augmentation_module(&a).unwrap();
        let hom = hom_dg(&reg, &w).unwrap();
        for k in w.carrier().space().support() {
            assert_eq!(hom.complex.dim(k), w.carrier().dim(k));
        }
        // Dims also match for W = A itself.
        let hom2 = hom_dg(&reg, &reg).unwrap();
        for k in -1..=1 {
            assert_eq!(hom2.complex.dim(k), reg.carrier().dim(k));
        }
    }

    #[test]
    fn identity_is_a_zero_cocycle() {
        let a = delta();
        let reg = DGModule::regular(&a).unwrap();
        let hom = hom_dg(&reg, &reg).unwrap();
        let z = hom.chain_map_cocycles();
        let id = GradedMorphism::identity(reg.carrier().space());
        // id is in the span of the cocycles: check it is a chain map fixed
        // by the solver route as well.
        assert!(module_chain_map_basis(&reg, &reg).unwrap().len() >= 1);
        assert!(z.iter().any(|c| !c.is_zero()));
        let boundary = hom_differential(reg.carrier(), reg.carrier(), &id).unwrap();
        assert!(boundary.is_zero());
    }

    #[test]
    fn h0_vanishes_from_free_into_acyclic() {
        let a = delta();
        let reg = DGModule::regular(&a).unwrap();
        let (acyclic, _) = cone_module(&ModuleMap::identity(&reg)).unwrap();
        let hom = hom_dg(&reg, &acyclic).unwrap();
        assert_eq!(hom.complex.cohomology().dim(0), 0);
    }

    #[test]
    fn module_homotopy_respects_linearity() {
        let a = delta();
        let reg = DGModule::regular(&a).unwrap();
        let (acyclic, _) = cone_module(&ModuleMap::identity(&reg)).unwrap();
        // Cone of the identity is module-contractible.
        let idc = ModuleMap::identity(&acyclic);
        let h = module_null_homotopy(&idc).unwrap().expect("contractible");
        assert!(crate::dg::module::is_module_linear(&acyclic, &acyclic, &h).unwrap());
    }

    #[test]
    fn no_module_homotopy_for_identity_of_augmentation() {
        let a = lambda();
        let aug = augmentation_module(&a).unwrap();
        assert!(module_null_homotopy(&ModuleMap::identity(&aug)).unwrap().is_none());
    }
}
