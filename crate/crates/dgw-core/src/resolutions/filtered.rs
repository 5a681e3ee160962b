//! Filtered DG modules with chosen graded splittings, and the inductive
//! null-homotopy construction over a finite filtration.
//!
//! Each step identifies `F_{i+1}` with the cone over a morphism from
//! `Gr_{i+1}` into `F_i` via the semi-split exact sequence, corrects the
//! new block by the previous homotopy, and solves on the graded piece.

use std::collections::BTreeMap;


use crate::complex::Complex;
use crate::dg::module::DGModule;
use crate::error::Error;
use crate::graded::{Degree, GradedSpace};
use crate::linalg::Mat;
use crate::morphism::{homotopy_solve, hom_differential, ChainMap, GradedMorphism};

/// A finite exhaustive filtration `0 = F_0 (<) F_1 (<) ... (<) F_n = V` by
/// submodules, with a chosen graded complement for every step.
#[derive(Clone, Debug)]
pub struct FilteredDGModule {
    pub module: DGModule,
    /// Step i holds a basis of `F_{i+1}` and of the chosen complement
    /// `C_{i+1}` with `F_{i+1} = F_i (+) C_{i+1}` per degree.
    steps: Vec<FiltrationStep>,
}

#[derive(Clone, Debug)]
pub struct FiltrationStep {
    pub basis: BTreeMap<Degree, Mat>,
    pub complement: BTreeMap<Degree, Mat>,
}

impl FilteredDGModule {
    pub fn new(module: DGModule, steps: Vec<FiltrationStep>) -> Result<Self, Error> {
        if steps.is_empty() {
            return Err(Error::structural("filtration needs at least one step"));
        }
        let v = module.carrier();
        let get = |m: &BTreeMap<Degree, Mat>, k: Degree, ambient: usize| -> Mat {
            m.get(&k).cloned().unwrap_or_else(|| Mat::zeros(ambient, 0))
        };
        for (i, step) in steps.iter().enumerate() {
            for k in v.space().support() {
                let ambient = v.dim(k);
                let b = get(&step.basis, k, ambient);
                if b.rows() != ambient {
                    return Err(Error::validation(
                        "filtration",
                        "basis shape",
                        format!("step {} degree {k}", i + 1),
                    ));
                }
                if b.rank() != b.cols() {
                    return Err(Error::validation(
                        "filtration",
                        "basis independence",
                        format!("step {} degree {k}", i + 1),
                    ));
                }
                let prev = if i == 0 {
                    Mat::zeros(ambient, 0)
                } else {
                    get(&steps[i - 1].basis, k, ambient)
                };
                let c = get(&step.complement, k, ambient);
                // F_{i} (+) C_{i+1} = F_{i+1}: the stacked matrix must have
                // full rank and span the same space as the step basis.
                let stacked = prev.hstack(&c)?;
                if stacked.cols() != b.cols() || stacked.rank() != b.cols() {
                    return Err(Error::validation(
                        "filtration",
                        "graded splitting",
                        format!("step {} degree {k}", i + 1),
                    ));
                }
                if b.solve_matrix(&stacked)?.is_none() || stacked.solve_matrix(&b)?.is_none() {
                    return Err(Error::validation(
                        "filtration",
                        "splitting spans the step",
                        format!("step {} degree {k}", i + 1),
                    ));
                }
            }
        }
        // Exhaustive: F_n = V.
        let last = steps.last().unwrap();
        for k in v.space().support() {
            let b = get(&last.basis, k, v.dim(k));
            if b.cols() != v.dim(k) {
                return Err(Error::validation("filtration", "exhaustive", format!("degree {k}")));
            }
        }
        // Closure of every F_i under d and the action.
        for (i, step) in steps.iter().enumerate() {
            for k in v.space().support() {
                let b = get(&step.basis, k, v.dim(k));
                if b.cols() == 0 {
                    continue;
                }
                let moved = v.d_at(k).mul(&b)?;
                let target = get(&step.basis, k + 1, v.dim(k + 1));
                if target.solve_matrix(&moved)?.is_none() {
                    return Err(Error::validation(
                        "filtration",
                        "closed under d",
                        format!("step {} degree {k}", i + 1),
                    ));
                }
                for a in 0..module.algebra().dim() {
                    let deg = module.algebra().basis().degree(a);
                    let acted = module.action(a).mat_at(k).mul(&b)?;
                    let target = get(&step.basis, k + deg, v.dim(k + deg));
                    if target.solve_matrix(&acted)?.is_none() {
                        return Err(Error::validation(
                            "filtration",
                            "closed under the action",
                            format!("step {} degree {k} basis element {a}", i + 1),
                        ));
                    }
                }
            }
        }
        Ok(FilteredDGModule { module, steps })
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn steps(&self) -> &[FiltrationStep] {
        &self.steps
    }

    /// The change of basis to adapted coordinates: per degree the columns
    /// of `[C_1 | C_2 | ... | C_n]`, which are a basis of `V`.
    pub fn adapted_basis(&self) -> Result<BTreeMap<Degree, Mat>, Error> {
        let v = self.module.carrier();
        let mut out = BTreeMap::new();
        for k in v.space().support() {
            let ambient = v.dim(k);
            let mut acc = Mat::zeros(ambient, 0);
            for step in &self.steps {
                let c = step
                    .complement
                    .get(&k)
                    .cloned()
                    .unwrap_or_else(|| Mat::zeros(ambient, 0));
                acc = acc.hstack(&c)?;
            }
            if acc.cols() != ambient {
                return Err(Error::structural("adapted basis does not span"));
            }
            out.insert(k, acc);
        }
        Ok(out)
    }

    /// Per-degree dimensions of each graded piece.
    pub fn piece_dims(&self, i: usize) -> BTreeMap<Degree, usize> {
        self.steps[i]
            .complement
            .iter()
            .filter(|(_, m)| m.cols() > 0)
            .map(|(&k, m)| (k, m.cols()))
            .collect()
    }
}

/// The output of the filtered algorithm: the homotopy in the original
/// coordinates plus the per-stage homotopies in adapted coordinates.
#[derive(Clone, Debug)]
pub struct FilteredHomotopy {
    pub h: GradedMorphism,
    /// Stage homotopies on `F_1 (<) F_2 (<) ...` in adapted coordinates;
    /// stage i+1 restricted to the first blocks equals stage i.
    pub stages: Vec<GradedMorphism>,
}

/// `filtered_null_homotopy`. The target must be acyclic; a missing
/// homotopy on some graded piece is reported with its step index.
pub fn filtered_null_homotopy(
    fv: &FilteredDGModule,
    f: &ChainMap,
) -> Result<FilteredHomotopy, Error> {
    let v = fv.module.carrier();
    let z = &f.target;
    if &f.source != v {
        return Err(Error::structural("map is not defined on the filtered module"));
    }
    if !z.is_acyclic() {
        return Err(Error::structural("filtered_null_homotopy: target is not acyclic"));
    }
    let adapted = fv.adapted_basis()?;
    let inv: BTreeMap<Degree, Mat> = adapted
        .iter()
        .map(|(&k, m)| (k, m.inverse().expect("adapted basis is invertible")))
        .collect();
    // Differential in adapted coordinates.
    let d_ad: BTreeMap<Degree, Mat> = v
        .space()
        .support()
        .filter(|&k| v.dim(k + 1) > 0)
        .map(|k| {
            let m = inv
                .get(&(k + 1))
                .map(|lhs| lhs.mul(&v.d_at(k).mul(&adapted[&k]).unwrap()).unwrap())
                .unwrap_or_else(|| Mat::zeros(0, v.dim(k)));
            (k, m)
        })
        .collect();
    let f_ad: BTreeMap<Degree, Mat> = v
        .space()
        .support()
        .map(|k| (k, f.mat_at(k).mul(&adapted[&k]).unwrap()))
        .collect();

    let n = fv.len();
    // Block offsets per degree for the adapted coordinates.
    let block_dims: Vec<BTreeMap<Degree, usize>> = (0..n).map(|i| fv.piece_dims(i)).collect();
    let offset = |i: usize, k: Degree| -> usize {
        (0..i).map(|j| block_dims[j].get(&k).copied().unwrap_or(0)).sum()
    };
    let filtered_dim = |i: usize, k: Degree| -> usize { offset(i, k) };

    // The complex of F_i in adapted coordinates (leading square block).
    let sub_complex = |i: usize| -> Result<Complex, Error> {
        let dims: Vec<(Degree, usize)> =
            v.space().support().map(|k| (k, filtered_dim(i, k))).collect();
        let space = GradedSpace::from_dims(&dims);
        let mut d = BTreeMap::new();
        for k in v.space().support() {
            let rows = filtered_dim(i, k + 1);
            let cols = filtered_dim(i, k);
            if rows == 0 || cols == 0 {
                continue;
            }
            let big = &d_ad[&k];
            d.insert(k, Mat::from_fn(rows, cols, |r, c| big.at(r, c).clone()));
        }
        Complex::new(space, d)
    };
    // The graded piece Gr_i (block i of the adapted differential).
    let piece_complex = |i: usize| -> Result<Complex, Error> {
        let dims: Vec<(Degree, usize)> = block_dims[i].iter().map(|(&k, &d)| (k, d)).collect();
        let space = GradedSpace::from_dims(&dims);
        let mut d = BTreeMap::new();
        for (&k, &cols) in &block_dims[i] {
            let rows = block_dims[i].get(&(k + 1)).copied().unwrap_or(0);
            if rows == 0 || cols == 0 {
                continue;
            }
            let big = d_ad.get(&k).expect("degree in support");
            let ro = offset(i, k + 1);
            let co = offset(i, k);
            d.insert(k, Mat::from_fn(rows, cols, |r, c| big.at(ro + r, co + c).clone()));
        }
        Complex::new(space, d)
    };

    let mut stages: Vec<GradedMorphism> = Vec::new();
    for i in 0..n {
        let gr = piece_complex(i)?;
        // phi_1: the f-block on the new graded piece.
        let mut phi1_mats = BTreeMap::new();
        for (&k, &cols) in &block_dims[i] {
            let rows = z.dim(k);
            if rows == 0 || cols == 0 {
                continue;
            }
            let big = &f_ad[&k];
            let co = offset(i, k);
            phi1_mats.insert(k, Mat::from_fn(rows, cols, |r, c| big.at(r, co + c).clone()));
        }
        let phi1 = GradedMorphism::new(0, gr.space().clone(), z.space().clone(), phi1_mats)?;

        let corrected = if i == 0 {
            phi1
        } else {
            // tau: Gr_i -> F_{i-1}'s block column of the adapted d, a
            // degree +1 morphism; the correction is h_{i-1} . tau.
            let prev = sub_complex(i)?;
            let mut tau_mats = BTreeMap::new();
            for (&k, &cols) in &block_dims[i] {
                let rows = filtered_dim(i, k + 1);
                if rows == 0 || cols == 0 {
                    continue;
                }
                let big = &d_ad[&k];
                let co = offset(i, k);
                tau_mats.insert(k, Mat::from_fn(rows, cols, |r, c| big.at(r, co + c).clone()));
            }
            let tau = GradedMorphism::new(1, gr.space().clone(), prev.space().clone(), tau_mats)?;
            let h_prev = &stages[i - 1];
            phi1.sub(&h_prev.compose(&tau)?)?
        };
        // Lemma 1.2(i): the corrected block is a chain map.
        let corrected_map = ChainMap::new(gr.clone(), z.clone(), corrected).map_err(|_| {
            Error::validation(
                "filtered_null_homotopy",
                "corrected block is a chain map",
                format!("step {}", i + 1),
            )
        })?;
        let h_piece = homotopy_solve(&corrected_map).ok_or_else(|| {
            Error::validation(
                "filtered_null_homotopy",
                "graded piece admits a null-homotopy",
                format!("step {}", i + 1),
            )
        })?;
        // h_{i+1} = [h_i | h_piece] on F_{i+1} = F_i (+) Gr_{i+1}.
        let mut mats = BTreeMap::new();
        for k in v.space().support() {
            let rows = z.dim(k - 1);
            let cols = filtered_dim(i + 1, k);
            if rows == 0 || cols == 0 {
                continue;
            }
            let left = if i == 0 {
                Mat::zeros(rows, 0)
            } else {
                stages[i - 1].mat_at(k)
            };
            let right = h_piece.mat_at(k);
            mats.insert(k, left.hstack(&right)?);
        }
        let sub_space =
            GradedSpace::from_dims(&v.space().support().map(|k| (k, filtered_dim(i + 1, k))).collect::<Vec<_>>());
        stages.push(GradedMorphism::new_unchecked(-1, sub_space, z.space().clone(), mats));
    }

    // Back to the original coordinates: h = h_adapted . A^{-1}.
    let full = stages.last().unwrap();
    let mut mats = BTreeMap::new();
    for k in v.space().support() {
        let rows = z.dim(k - 1);
        if rows == 0 || v.dim(k) == 0 {
            continue;
        }
        mats.insert(k, full.mat_at(k).mul(&inv[&k])?);
    }
    let h = GradedMorphism::new(-1, v.space().clone(), z.space().clone(), mats)?;
    let boundary = hom_differential(v, z, &h)?;
    if &boundary != f.morphism() {
        return Err(Error::validation(
            "filtered_null_homotopy",
            "f = d h + h d",
            "assembled homotopy fails the defining identity",
        ));
    }
    Ok(FilteredHomotopy { h, stages })
}

/// Checks the stage-compatibility invariant: each stage homotopy restricted
/// to the previous filtration step equals the previous stage.
pub fn stages_compatible(fh: &FilteredHomotopy) -> bool {
    for i in 1..fh.stages.len() {
        let prev = &fh.stages[i - 1];
        let cur = &fh.stages[i];
        for (&k, m_prev) in prev.blocks() {
            let m_cur = cur.mat_at(k);
            for r in 0..m_prev.rows() {
                for c in 0..m_prev.cols() {
                    if m_cur.at(r, c) != m_prev.at(r, c) {
                        return false;
                    }
                }
            }
        }
        // Zero blocks of prev must also appear as zero columns in cur.
        for k in prev.source().support() {
            let cols_prev = prev.source().dim(k);
            let m_cur = cur.mat_at(k);
            let m_prev = prev.mat_at(k);
            for r in 0..m_cur.rows() {
                for c in 0..cols_prev {
                    if m_cur.at(r, c) != m_prev.at(r, c) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::algebra::DGAlgebra;
    use crate::linalg::rat;

    /// Wraps a complex as a module over the ground field.
    pub fn as_q_module(c: &Complex) -> DGModule {
        let q = DGAlgebra::ground_field();
        DGModule::new("M", q, c.clone(), vec![GradedMorphism::identity(c.space())]).unwrap()
    }

    fn interval(at: Degree) -> Complex {
        let space = GradedSpace::from_dims(&[(at, 1), (at + 1, 1)]);
        let mut d = BTreeMap::new();
        d.insert(at, Mat::from_rows(vec![vec![rat(1)]]).unwrap());
        Complex::new(space, d).unwrap()
    }

    fn full_filtration_of_sum(c1: &Complex, c2: &Complex) -> (DGModule, Vec<FiltrationStep>) {
        let sum = c1.direct_sum(c2).unwrap();
        let m = as_q_module(&sum);
        let mut step1_basis = BTreeMap::new();
        let mut step1_comp = BTreeMap::new();
        let mut step2_basis = BTreeMap::new();
        let mut step2_comp = BTreeMap::new();
        for k in sum.space().support() {
            let total = sum.dim(k);
            let d1 = c1.dim(k);
            let first = Mat::from_fn(total, d1, |i, j| if i == j { rat(1) } else { rat(0) });
            step1_basis.insert(k, first.clone());
            step1_comp.insert(k, first);
            step2_basis.insert(k, Mat::identity(total));
            step2_comp.insert(
                k,
                Mat::from_fn(total, total - d1, |i, j| if i == d1 + j { rat(1) } else { rat(0) }),
            );
        }
        (
            m,
            vec![
                FiltrationStep { basis: step1_basis, complement: step1_comp },
                FiltrationStep { basis: step2_basis, complement: step2_comp },
            ],
        )
    }

    #[test]
    fn length_one_reduces_to_direct_solve() {
        let c = interval(0);
        let m = as_q_module(&c);
        let mut basis = BTreeMap::new();
        let mut comp = BTreeMap::new();
        for k in c.space().support() {
            basis.insert(k, Mat::identity(c.dim(k)));
            comp.insert(k, Mat::identity(c.dim(k)));
        }
        let fv = FilteredDGModule::new(m, vec![FiltrationStep { basis, complement: comp }]).unwrap();
        let z = interval(0);
        let f = ChainMap::identity(&c);
        let _ = z;
        let fh = filtered_null_homotopy(&fv, &f).unwrap();
        let boundary = hom_differential(&c, &c, &fh.h).unwrap();
        assert_eq!(&boundary, f.morphism());
    }

    #[test]
    fn zero_map_gets_zero_homotopy() {
        let (m, steps) = full_filtration_of_sum(&interval(0), &interval(1));
        let fv = FilteredDGModule::new(m, steps).unwrap();
        let z = interval(0);
        let f = ChainMap::zero(fv.module.carrier(), &z);
        let fh = filtered_null_homotopy(&fv, &f).unwrap();
        assert!(fh.h.is_zero());
        assert!(stages_compatible(&fh));
    }

    #[test]
    fn non_acyclic_target_refused() {
        let (m, steps) = full_filtration_of_sum(&interval(0), &interval(1));
        let fv = FilteredDGModule::new(m, steps).unwrap();
        let line = Complex::new(GradedSpace::from_dims(&[(0, 1)]), BTreeMap::new()).unwrap();
        let f = ChainMap::zero(fv.module.carrier(), &line);
        assert!(filtered_null_homotopy(&fv, &f).is_err());
    }

    #[test]
    fn two_step_filtration_identity_map() {
        let (m, steps) = full_filtration_of_sum(&interval(0), &interval(0));
        let fv = FilteredDGModule::new(m.clone(), steps).unwrap();
        let c = m.carrier().clone();
        let f = ChainMap::identity(&c);
        let fh = filtered_null_homotopy(&fv, &f).unwrap();
        assert!(stages_compatible(&fh));
        let boundary = hom_differential(&c, &c, &fh.h).unwrap();
        assert_eq!(&boundary, f.morphism());
    }
}
