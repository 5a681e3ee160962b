//! Change of DG algebras along a morphism `eps: D -> E`: the left adjoint
//! `V |-> V (x)_D E` of restriction of scalars, computed as an exact
//! quotient of the plain tensor product.
//!
//! The relation span is generated by
//! `(-1)^{|x||v|} (iota(x) v) (x) e  -  v (x) (eps(x) e)`, and `E` acts by
//! right multiplication in the second factor twisted to a left action with
//! Koszul signs. Both algebras must be graded-commutative or carry an
//! anti-involution. Module axioms are re-validated after construction.

use std::collections::BTreeMap;

use num::Zero;

use crate::complex::Complex;
use crate::dg::algebra::{DGAlgebraMorphism, FlatBasis};
use crate::dg::module::{restrict_scalars, DGModule, ModuleMap, PairBasis};
use crate::error::Error;
use crate::graded::{Degree, DegreeData, GradedSpace};
use crate::linalg::{rat, Mat, Rat};
use crate::morphism::GradedMorphism;

/// The result of a change of algebras, keeping the quotient data so that
/// induced maps can be computed.
#[derive(Clone, Debug)]
pub struct TensorChange {
    pub eps: DGAlgebraMorphism,
    pub source: DGModule,
    pub module: DGModule,
    pair: PairBasis,
    /// Per-degree projection from the plain tensor onto quotient
    /// coordinates, and its section.
    q: BTreeMap<Degree, Mat>,
    s: BTreeMap<Degree, Mat>,
}

fn sign(parity: i64) -> Rat {
    if parity.rem_euclid(2) == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

impl TensorChange {
    pub fn project(&self, k: Degree) -> Mat {
        self.q.get(&k).cloned().unwrap_or_else(|| Mat::zeros(self.module.carrier().dim(k), self.pair.dim(k)))
    }

    pub fn section(&self, k: Degree) -> Mat {
        self.s.get(&k).cloned().unwrap_or_else(|| Mat::zeros(self.pair.dim(k), self.module.carrier().dim(k)))
    }

    pub fn pair(&self) -> &PairBasis {
        &self.pair
    }

    /// The class of `v (x) e` in quotient coordinates.
    pub fn class_of(&self, v_flat: usize, e_flat: usize) -> (Degree, Mat) {
        let (k, pos) = self.pair.position(v_flat, e_flat);
        let q = self.project(k);
        (k, q.select_cols(&[pos]))
    }
}

/// `tensor_change`: the module `V (x)_D E` over the target of `eps`.
pub fn tensor_change(eps: &DGAlgebraMorphism, v: &DGModule) -> Result<TensorChange, Error> {
    if v.algebra() != &eps.source {
        return Err(Error::structural("tensor_change: module is not over the morphism source"));
    }
    eps.source.involution_or_identity()?;
    eps.target.involution_or_identity()?;
    let d_alg = &eps.source;
    let e_alg = &eps.target;
    let vb = FlatBasis::from_space(v.carrier().space());
    let eb = e_alg.basis().clone();
    let pair = PairBasis::build(&vb, &eb);

    // Differential on the plain tensor.
    let plain_d = |k: Degree| -> Mat {
        let rows = pair.dim(k + 1);
        let cols = pair.dim(k);
        let mut m = Mat::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        for (col, &(vf, ef)) in pair.by_degree[&k].iter().enumerate() {
            let (vd, vi) = vb.unflat(vf);
            let dv = v.carrier().d_at(vd);
            for r in 0..dv.rows() {
                if !dv.at(r, vi).is_zero() {
                    let t = vb.flat(vd + 1, r).unwrap();
                    let (_, row) = pair.position(t, ef);
                    m.set(row, col, dv.at(r, vi).clone());
                }
            }
            let sg = sign(vd);
            for (t, c) in e_alg.d_elem(&[(ef, rat(1))]) {
                let (_, row) = pair.position(vf, t);
                let cur = m.at(row, col).clone();
                m.set(row, col, cur + c * &sg);
            }
        }
        m
    };

    // Action of a target basis element on the plain tensor:
    // e' . (v (x) e) = (-1)^{|e'| (|v|+|e|)} v (x) (e iota(e')).
    let plain_action = |ep: usize, k: Degree| -> Mat {
        let deg = eb.degree(ep);
        let rows = pair.dim(k + deg);
        let cols = pair.dim(k);
        let mut m = Mat::zeros(rows, cols);
        if rows == 0 || cols == 0 {
            return m;
        }
        let iota_ep = e_alg.iota_elem(&[(ep, rat(1))]);
        for (col, &(vf, ef)) in pair.by_degree[&k].iter().enumerate() {
            let sg = sign(deg * k);
            let prod = e_alg.multiply(&[(ef, rat(1))], &iota_ep);
            for (t, c) in prod {
                let (_, row) = pair.position(vf, t);
                let cur = m.at(row, col).clone();
                m.set(row, col, cur + c * &sg);
            }
        }
        m
    };

    // Relation vectors per degree.
    let mut relations: BTreeMap<Degree, Vec<Vec<Rat>>> = BTreeMap::new();
    for x in 0..d_alg.dim() {
        if x == d_alg.unit() {
            continue;
        }
        let iota_x = d_alg.iota_elem(&[(x, rat(1))]);
        let eps_x = eps.apply(&[(x, rat(1))]);
        for vf in 0..vb.len() {
            let (vd, vi) = vb.unflat(vf);
            for ef in 0..eb.len() {
                let k = d_alg.basis().degree(x) + vd + eb.degree(ef);
                let dim = pair.dim(k);
                if dim == 0 {
                    continue;
                }
                let mut vec = vec![Rat::zero(); dim];
                // (-1)^{|x||v|} (iota(x) v) (x) e
                let sg = sign(d_alg.basis().degree(x) * vd);
                for (xi, xc) in &iota_x {
                    let act = v.action(*xi).mat_at(vd);
                    for r in 0..act.rows() {
                        let c = act.at(r, vi);
                        if !c.is_zero() {
                            let t = vb.flat(vd + d_alg.basis().degree(*xi), r).unwrap();
                            let (_, row) = pair.position(t, ef);
                            vec[row] += c * xc * &sg;
                        }
                    }
                }
                // - v (x) (eps(x) e)
                let prod = e_alg.multiply(&eps_x, &[(ef, rat(1))]);
                for (t, c) in prod {
                    let (_, row) = pair.position(vf, t);
                    vec[row] -= c;
                }
                if vec.iter().any(|c| !c.is_zero()) {
                    relations.entry(k).or_default().push(vec);
                }
            }
        }
    }

    // Quotient per degree.
    let mut q = BTreeMap::new();
    let mut s = BTreeMap::new();
    let mut rel_mats: BTreeMap<Degree, Mat> = BTreeMap::new();
    let mut dims: Vec<(Degree, usize)> = Vec::new();
    for (&k, _) in &pair.by_degree {
        let ambient = pair.dim(k);
        let rel_cols: Vec<Vec<Rat>> = relations.get(&k).cloned().unwrap_or_default();
        let rel = if rel_cols.is_empty() {
            Mat::zeros(ambient, 0)
        } else {
            Mat::from_fn(ambient, rel_cols.len(), |i, j| rel_cols[j][i].clone())
        };
        let rel_basis = rel.image();
        let sub = crate::linalg::Subspace::new(ambient, rel_basis)?;
        let (qk, sk) = crate::linalg::quotient_map(ambient, &sub)?;
        if qk.rows() > 0 {
            dims.push((k, qk.rows()));
        }
        rel_mats.insert(k, rel);
        q.insert(k, qk);
        s.insert(k, sk);
    }

    let mut space_data = BTreeMap::new();
    for &(k, dim) in &dims {
        space_data.insert(
            k,
            DegreeData {
                dim,
                labels: (0..dim).map(|i| format!("t{}_{}", k, i)).collect(),
                weights: None,
            },
        );
    }
    let space = GradedSpace::new(space_data)?;

    // Induced differential; the relation span must be preserved.
    let mut d = BTreeMap::new();
    for (&k, qk) in &q {
        let rows_q = q.get(&(k + 1)).map_or(0, |m| m.rows());
        if qk.cols() == 0 && rows_q == 0 {
            continue;
        }
        let pd = plain_d(k);
        if let Some(rel) = rel_mats.get(&k) {
            if rel.cols() > 0 && rows_q > 0 {
                let moved = pd.mul(rel)?;
                let killed = q[&(k + 1)].mul(&moved)?;
                if !killed.is_zero() {
                    return Err(Error::validation(
                        "tensor_change",
                        "differential preserves the relation span",
                        format!("degree {k}"),
                    ));
                }
            }
        }
        if rows_q == 0 || qk.rows() == 0 {
            continue;
        }
        let sk = &s[&k];
        let m = q[&(k + 1)].mul(&pd.mul(sk)?)?;
        if m.rows() > 0 && m.cols() > 0 {
            d.insert(k, m);
        }
    }
    let carrier = Complex::new(space, d)?;

    // Induced action of the target algebra.
    let mut action = Vec::new();
    for ep in 0..e_alg.dim() {
        let deg = eb.degree(ep);
        let mut mats = BTreeMap::new();
        for (&k, qk) in &q {
            let rows_q = q.get(&(k + deg)).map_or(0, |m| m.rows());
            if qk.rows() == 0 || rows_q == 0 {
                continue;
            }
            let pa = plain_action(ep, k);
            if let Some(rel) = rel_mats.get(&k) {
                if rel.cols() > 0 {
                    let killed = q[&(k + deg)].mul(&pa.mul(rel)?)?;
                    if !killed.is_zero() {
                        return Err(Error::validation(
                            "tensor_change",
                            "action preserves the relation span",
                            format!("element {ep} at degree {k}"),
                        ));
                    }
                }
            }
            let m = q[&(k + deg)].mul(&pa.mul(&s[&k])?)?;
            mats.insert(k, m);
        }
        action.push(GradedMorphism::new(deg, carrier.space().clone(), carrier.space().clone(), mats)?);
    }
    let module = DGModule::new(
        format!("{}(x)_{}{}", v.name, d_alg.name, e_alg.name),
        e_alg.clone(),
        carrier,
        action,
    )?;
    Ok(TensorChange { eps: eps.clone(), source: v.clone(), module, pair, q, s })
}

/// The unit `Phi_V: V -> For(V (x)_D E)`, `v |-> v (x) 1`.
pub fn unit_map(tc: &TensorChange) -> Result<ModuleMap, Error> {
    let target = restrict_scalars(&tc.eps, &tc.module)?;
    let vb = FlatBasis::from_space(tc.source.carrier().space());
    let e_unit = tc.eps.target.unit();
    let mut mats = BTreeMap::new();
    for (k, data) in tc.source.carrier().space().iter() {
        let rows = target.carrier().dim(k);
        let mut m = Mat::zeros(rows, data.dim);
        for j in 0..data.dim {
            let vf = vb.flat(k, j).unwrap();
            let (_, cls) = tc.class_of(vf, e_unit);
            for r in 0..rows {
                m.set(r, j, cls.at(r, 0).clone());
            }
        }
        mats.insert(k, m);
    }
    ModuleMap::new(
        tc.source.clone(),
        target,
        GradedMorphism::new(0, tc.source.carrier().space().clone(), tc.module.carrier().space().clone(), mats)?,
    )
}

/// The counit `Psi_W: For(W) (x)_D E -> W`,
/// `w (x) e |-> (-1)^{|w||e|} iota(e) . w`, for a module `W` over the
/// target. `tc` must be the change of algebras applied to `For(W)`.
pub fn counit_map(tc: &TensorChange, w: &DGModule) -> Result<ModuleMap, Error> {
    if w.algebra() != &tc.eps.target {
        return Err(Error::structural("counit: module is not over the morphism target"));
    }
    if tc.source.carrier() != w.carrier() {
        return Err(Error::structural("counit: tensor source is not the restriction of the module"));
    }
    let e_alg = &tc.eps.target;
    let wb = FlatBasis::from_space(w.carrier().space());
    // Plain map on the tensor, then compose with the section.
    let mut mats = BTreeMap::new();
    for (&k, pairs) in &tc.pair.by_degree {
        let rows = w.carrier().dim(k);
        if rows == 0 && pairs.is_empty() {
            continue;
        }
        let mut plain = Mat::zeros(rows, pairs.len());
        for (col, &(wf, ef)) in pairs.iter().enumerate() {
            let (wd, wi) = wb.unflat(wf);
            let sg = sign(wd * e_alg.basis().degree(ef));
            for (t, c) in e_alg.iota_elem(&[(ef, rat(1))]) {
                let act = w.action(t).mat_at(wd);
                for r in 0..act.rows() {
                    let v = act.at(r, wi);
                    if !v.is_zero() {
                        let cur = plain.at(r, col).clone();
                        plain.set(r, col, cur + v * &c * &sg);
                    }
                }
            }
        }
        // The plain map must kill the relation span.
        let rel_test = plain_kills_relations(tc, k, &plain)?;
        if !rel_test {
            return Err(Error::validation(
                "counit",
                "kills the relation span",
                format!("degree {k}"),
            ));
        }
        let m = plain.mul(&tc.section(k))?;
        mats.insert(k, m);
    }
    ModuleMap::new(
        tc.module.clone(),
        w.clone(),
        GradedMorphism::new(0, tc.module.carrier().space().clone(), w.carrier().space().clone(), mats)?,
    )
}

fn plain_kills_relations(tc: &TensorChange, k: Degree, plain: &Mat) -> Result<bool, Error> {
    // Reconstruct the relation span at degree k from the projection: the
    // kernel of q is exactly the relation span, so it suffices that
    // plain . ker(q) = 0.
    let q = tc.project(k);
    if q.cols() == 0 {
        return Ok(true);
    }
    let ker = q.kernel();
    if ker.cols() == 0 {
        return Ok(true);
    }
    Ok(plain.mul(&ker)?.is_zero())
}

/// Functoriality: the induced map `f (x) id` on quotients.
pub fn tensor_change_map(
    tc_src: &TensorChange,
    tc_tgt: &TensorChange,
    f: &ModuleMap,
) -> Result<ModuleMap, Error> {
    if f.source.carrier() != tc_src.source.carrier()
        || f.target.carrier() != tc_tgt.source.carrier()
    {
        return Err(Error::structural("tensor_change_map: endpoints do not match"));
    }
    let vb_src = FlatBasis::from_space(f.source.carrier().space());
    let vb_tgt = FlatBasis::from_space(f.target.carrier().space());
    let mut mats = BTreeMap::new();
    for (&k, pairs) in &tc_src.pair.by_degree {
        let rows_plain = tc_tgt.pair.dim(k);
        let mut plain = Mat::zeros(rows_plain, pairs.len());
        for (col, &(vf, ef)) in pairs.iter().enumerate() {
            let (vd, vi) = vb_src.unflat(vf);
            let fm = f.mat_at(vd);
            for r in 0..fm.rows() {
                let c = fm.at(r, vi);
                if !c.is_zero() {
                    let t = vb_tgt.flat(vd, r).unwrap();
                    let (_, row) = tc_tgt.pair.position(t, ef);
                    plain.set(row, col, c.clone());
                }
            }
        }
        let m = tc_tgt.project(k).mul(&plain.mul(&tc_src.section(k))?)?;
        mats.insert(k, m);
    }
    ModuleMap::new(
        tc_src.module.clone(),
        tc_tgt.module.clone(),
        GradedMorphism::new(
            0,
            tc_src.module.carrier().space().clone(),
            tc_tgt.module.carrier().space().clone(),
            mats,
        )?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dg::examples::{augmentation_module, augmentation_morphism, delta};
    use crate::dg::module::free_module;

    #[test]
    fn tensor_with_self_is_identity_change() {
        // V (x)_D D = V, inverse given by the action map.
        let d = delta();
        let v = DGModule::regular(&d).unwrap();
        let id = DGAlgebraMorphism::identity(&d);
        let tc = tensor_change(&id, &v).unwrap();
        let phi = unit_map(&tc).unwrap();
        let psi = counit_map(&tc, &v).unwrap();
        // psi . phi = id_V exactly.
        let round = psi.morphism().compose(phi.morphism()).unwrap();
        assert_eq!(round, GradedMorphism::identity(v.carrier().space()));
        // phi . psi = id on the quotient.
        let round2 = phi.morphism().compose(psi.morphism()).unwrap();
        assert_eq!(round2, GradedMorphism::identity(tc.module.carrier().space()));
    }

    #[test]
    fn zero_module_tensors_to_zero() {
        let d = delta();
        let q = crate::dg::algebra::DGAlgebra::ground_field();
        let _ = q;
        let eps = augmentation_morphism(&d).unwrap();
        let zero_carrier = Complex::zero();
        let zero = DGModule::new(
            "0",
            d.clone(),
            zero_carrier,
            (0..d.dim())
                .map(|i| {
                    GradedMorphism::zero(
                        d.basis().degree(i),
                        GradedSpace::empty(),
                        GradedSpace::empty(),
                    )
                })
                .collect(),
        )
        .unwrap();
        let tc = tensor_change(&eps, &zero).unwrap();
        assert_eq!(tc.module.total_dim(), 0);
    }

    #[test]
    fn free_module_changes_to_free_module() {
        // (D (x) W) (x)_D E has dimension dim(E) * dim(W) in each total
        // degree pattern.
        let d = delta();
        let eps = augmentation_morphism(&d).unwrap();
        let w = GradedSpace::from_dims(&[(0, 1), (-2, 2)]);
        let (f, _) = free_module(&d, &w).unwrap();
        let tc = tensor_change(&eps, &f).unwrap();
        // E = Q here, so the result has dim(W) total.
        assert_eq!(tc.module.total_dim(), w.total_dim());
        for (k, data) in w.iter() {
            assert_eq!(tc.module.carrier().dim(k), data.dim);
        }
    }

    #[test]
    fn augmentation_module_tensors_to_line() {
        let d = delta();
        let eps = augmentation_morphism(&d).unwrap();
        let v = augmentation_module(&d).unwrap();
        let tc = tensor_change(&eps, &v).unwrap();
        assert_eq!(tc.module.total_dim(), 1);
        assert_eq!(tc.module.carrier().dim(0), 1);
    }
}
