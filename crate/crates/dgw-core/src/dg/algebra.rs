//! Finite-dimensional DG algebras given by structure constants on a graded
//! basis, with exhaustive axiom validation, and morphisms between them.

use std::collections::BTreeMap;

use num::Zero;

use crate::complex::Complex;
use crate::error::Error;
use crate::graded::{Degree, GradedSpace, Weight};
use crate::linalg::{rat_to_string, Mat, Rat};
use crate::morphism::{is_quasi_iso, ChainMap, GradedMorphism};

/// Flat indexing of a graded basis: degrees ascending, original order within
/// a degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatBasis {
    degrees: Vec<Degree>,
    offsets: BTreeMap<Degree, usize>,
}

impl FlatBasis {
    pub fn from_space(space: &GradedSpace) -> Self {
        let mut degrees = Vec::new();
        let mut offsets = BTreeMap::new();
        for (k, data) in space.iter() {
            offsets.insert(k, degrees.len());
            degrees.extend(std::iter::repeat(k).take(data.dim));
        }
        FlatBasis { degrees, offsets }
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn degree(&self, flat: usize) -> Degree {
        self.degrees[flat]
    }

    pub fn flat(&self, deg: Degree, idx: usize) -> Option<usize> {
        self.offsets.get(&deg).map(|off| off + idx)
    }

    pub fn unflat(&self, flat: usize) -> (Degree, usize) {
        let deg = self.degrees[flat];
        (deg, flat - self.offsets[&deg])
    }
}

/// An algebra element in flat coordinates; kept sorted by index with
/// nonzero coefficients.
pub type Elem = Vec<(usize, Rat)>;

pub fn elem_normalize(mut e: Elem) -> Elem {
    e.sort_by_key(|&(i, _)| i);
    let mut out: Elem = Vec::new();
    for (i, c) in e {
        if c.is_zero() {
            continue;
        }
        match out.last_mut() {
            Some((j, acc)) if *j == i => *acc += c,
            _ => out.push((i, c)),
        }
    }
    out.retain(|(_, c)| !c.is_zero());
    out
}

pub fn elem_add(a: &Elem, b: &Elem) -> Elem {
    let mut out = a.clone();
    out.extend(b.iter().cloned());
    elem_normalize(out)
}

pub fn elem_scale(a: &Elem, c: &Rat) -> Elem {
    if c.is_zero() {
        return Vec::new();
    }
    a.iter().map(|(i, v)| (*i, v * c)).collect()
}

pub fn elem_sub(a: &Elem, b: &Elem) -> Elem {
    elem_add(a, &elem_scale(b, &crate::linalg::rat(-1)))
}

fn elem_to_string(e: &Elem, labels: &[String]) -> String {
    if e.is_empty() {
        return "0".to_string();
    }
    e.iter()
        .map(|(i, c)| format!("{}*{}", rat_to_string(c), labels[*i]))
        .collect::<Vec<_>>()
        .join(" + ")
}

/// A validated DG algebra.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DGAlgebra {
    pub name: String,
    carrier: Complex,
    basis: FlatBasis,
    unit: usize,
    /// mul[i][j] = e_i * e_j expanded over the flat basis.
    mul: Vec<Vec<Elem>>,
    anti_involution: Option<BTreeMap<Degree, Mat>>,
}

impl DGAlgebra {
    /// Validates every axiom on all basis tuples and returns the algebra.
    pub fn new(
        name: impl Into<String>,
        carrier: Complex,
        unit: usize,
        mul: Vec<Vec<Elem>>,
        anti_involution: Option<BTreeMap<Degree, Mat>>,
    ) -> Result<Self, Error> {
        let name = name.into();
        let basis = FlatBasis::from_space(carrier.space());
        let n = basis.len();
        if n == 0 {
            return Err(Error::validation(&name, "nonempty carrier", "algebra has dimension 0"));
        }
        if unit >= n || basis.degree(unit) != 0 {
            return Err(Error::validation(&name, "unit in degree 0", format!("unit index {unit}")));
        }
        if mul.len() != n || mul.iter().any(|row| row.len() != n) {
            return Err(Error::validation(&name, "product table shape", "table is not n x n"));
        }
        let iota = match anti_involution {
            Some(mats) => {
                for (k, data) in carrier.space().iter() {
                    let m = mats.get(&k).ok_or_else(|| {
                        Error::validation(&name, "involution shape", format!("missing degree {k}"))
                    })?;
                    if m.rows() != data.dim || m.cols() != data.dim {
                        return Err(Error::validation(
                            &name,
                            "involution shape",
                            format!("degree {k}"),
                        ));
                    }
                }
                Some(mats)
            }
            None => None,
        };
        let alg =
            DGAlgebra { name, carrier, basis, unit, mul, anti_involution: iota };
        alg.validate()?;
        Ok(alg)
    }

    fn validate(&self) -> Result<(), Error> {
        let n = self.basis.len();
        let labels = self.flat_labels();
        // Degree additivity and weight additivity of products.
        for i in 0..n {
            for j in 0..n {
                let expected = self.basis.degree(i) + self.basis.degree(j);
                for (k, c) in &self.mul[i][j] {
                    if !c.is_zero() && self.basis.degree(*k) != expected {
                        return Err(Error::validation(
                            &self.name,
                            "product grading",
                            format!("{} * {} meets degree {}", labels[i], labels[j], self.basis.degree(*k)),
                        ));
                    }
                }
                if let (Some(wi), Some(wj)) = (self.weight_of(i), self.weight_of(j)) {
                    let sum: Weight = wi.iter().zip(wj).map(|(a, b)| a + b).collect();
                    for (k, c) in &self.mul[i][j] {
                        if !c.is_zero() && self.weight_of(*k) != Some(sum.clone()) {
                            return Err(Error::validation(
                                &self.name,
                                "product weight additivity",
                                format!("{} * {}", labels[i], labels[j]),
                            ));
                        }
                    }
                }
            }
        }
        // Unit laws.
        for j in 0..n {
            let left = elem_normalize(self.mul[self.unit][j].clone());
            let right = elem_normalize(self.mul[j][self.unit].clone());
            let ej: Elem = vec![(j, crate::linalg::rat(1))];
            if left != ej {
                return Err(Error::validation(
                    &self.name,
                    "left unit law",
                    format!("1*{} = {}", labels[j], elem_to_string(&left, &labels)),
                ));
            }
            if right != ej {
                return Err(Error::validation(
                    &self.name,
                    "right unit law",
                    format!("{}*1 = {}", labels[j], elem_to_string(&right, &labels)),
                ));
            }
        }
        // Associativity on all basis triples.
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let left = self.multiply(&self.mul[i][j], &[(k, crate::linalg::rat(1))]);
                    let right = self.multiply(&[(i, crate::linalg::rat(1))], &self.mul[j][k]);
                    if left != right {
                        return Err(Error::validation(
                            &self.name,
                            "associativity",
                            format!("({}*{})*{} != {}*({}*{})",
                                labels[i], labels[j], labels[k], labels[i], labels[j], labels[k]),
                        ));
                    }
                }
            }
        }
        // d(1) = 0.
        if !self.d_elem(&[(self.unit, crate::linalg::rat(1))]).is_empty() {
            return Err(Error::validation(&self.name, "d(1) = 0", "unit is not a cocycle"));
        }
        // Leibniz on all basis pairs.
        for i in 0..n {
            for j in 0..n {
                let lhs = self.d_elem(&self.mul[i][j]);
                let di_j = self.multiply(&self.d_elem(&[(i, crate::linalg::rat(1))]), &[(j, crate::linalg::rat(1))]);
                let sign = if self.basis.degree(i).rem_euclid(2) == 0 {
                    crate::linalg::rat(1)
                } else {
                    crate::linalg::rat(-1)
                };
                let i_dj = elem_scale(
                    &self.multiply(&[(i, crate::linalg::rat(1))], &self.d_elem(&[(j, crate::linalg::rat(1))])),
                    &sign,
                );
                let rhs = elem_add(&di_j, &i_dj);
                if lhs != rhs {
                    return Err(Error::validation(
                        &self.name,
                        "Leibniz rule",
                        format!("d({}*{})", labels[i], labels[j]),
                    ));
                }
            }
        }
        // Anti-involution laws.
        if self.anti_involution.is_some() {
            for i in 0..n {
                let ii = self.iota_elem(&self.iota_elem(&[(i, crate::linalg::rat(1))]));
                if elem_normalize(ii) != vec![(i, crate::linalg::rat(1))] {
                    return Err(Error::validation(
                        &self.name,
                        "involution squares to identity",
                        labels[i].clone(),
                    ));
                }
                let di = self.d_elem(&self.iota_elem(&[(i, crate::linalg::rat(1))]));
                let id = self.iota_elem(&self.d_elem(&[(i, crate::linalg::rat(1))]));
                if di != id {
                    return Err(Error::validation(
                        &self.name,
                        "involution commutes with d",
                        labels[i].clone(),
                    ));
                }
            }
            for i in 0..n {
                for j in 0..n {
                    let lhs = self.iota_elem(&self.mul[i][j]);
                    let sign = if (self.basis.degree(i) * self.basis.degree(j)).rem_euclid(2) == 0 {
                        crate::linalg::rat(1)
                    } else {
                        crate::linalg::rat(-1)
                    };
                    let rhs = elem_scale(
                        &self.multiply(
                            &self.iota_elem(&[(j, crate::linalg::rat(1))]),
                            &self.iota_elem(&[(i, crate::linalg::rat(1))]),
                        ),
                        &sign,
                    );
                    if lhs != rhs {
                        return Err(Error::validation(
                            &self.name,
                            "involution anti-multiplicativity",
                            format!("iota({}*{})", labels[i], labels[j]),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The ground field as a DG algebra.
    pub fn ground_field() -> DGAlgebra {
        let space = GradedSpace::from_dims(&[(0, 1)]);
        let carrier = Complex::new(space, BTreeMap::new()).expect("ground field carrier");
        DGAlgebra::new("Q", carrier, 0, vec![vec![vec![(0, crate::linalg::rat(1))]]], None)
            .expect("ground field is a DG algebra")
    }

    pub fn carrier(&self) -> &Complex {
        &self.carrier
    }

    pub fn basis(&self) -> &FlatBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn unit_elem(&self) -> Elem {
        vec![(self.unit, crate::linalg::rat(1))]
    }

    pub fn flat_labels(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.basis.len());
        for f in 0..self.basis.len() {
            let (deg, idx) = self.basis.unflat(f);
            out.push(self.carrier.space().labels(deg)[idx].clone());
        }
        out
    }

    pub fn weight_of(&self, flat: usize) -> Option<Weight> {
        let (deg, idx) = self.basis.unflat(flat);
        self.carrier.space().weights(deg).map(|w| w[idx].clone())
    }

    pub fn product_table(&self) -> &Vec<Vec<Elem>> {
        &self.mul
    }

    pub fn multiply(&self, a: &[(usize, Rat)], b: &[(usize, Rat)]) -> Elem {
        let mut out = Vec::new();
        for (i, ci) in a {
            for (j, cj) in b {
                let coeff = ci * cj;
                out.extend(elem_scale(&self.mul[*i][*j], &coeff));
            }
        }
        elem_normalize(out)
    }

    /// d of an element, via the carrier differential.
    pub fn d_elem(&self, a: &[(usize, Rat)]) -> Elem {
        let mut out = Vec::new();
        for (i, c) in a {
            let (deg, idx) = self.basis.unflat(*i);
            let d = self.carrier.d_at(deg);
            for row in 0..d.rows() {
                let v = d.at(row, idx);
                if !v.is_zero() {
                    if let Some(f) = self.basis.flat(deg + 1, row) {
                        out.push((f, v * c));
                    }
                }
            }
        }
        elem_normalize(out)
    }

    pub fn has_involution(&self) -> bool {
        self.anti_involution.is_some()
    }

    pub fn iota_elem(&self, a: &[(usize, Rat)]) -> Elem {
        let Some(mats) = &self.anti_involution else {
            return a.to_vec();
        };
        let mut out = Vec::new();
        for (i, c) in a {
            let (deg, idx) = self.basis.unflat(*i);
            let m = &mats[&deg];
            for row in 0..m.rows() {
                let v = m.at(row, idx);
                if !v.is_zero() {
                    if let Some(f) = self.basis.flat(deg, row) {
                        out.push((f, v * c));
                    }
                }
            }
        }
        elem_normalize(out)
    }

    pub fn is_graded_commutative(&self) -> bool {
        let n = self.basis.len();
        for i in 0..n {
            for j in 0..n {
                let sign = if (self.basis.degree(i) * self.basis.degree(j)).rem_euclid(2) == 0 {
                    crate::linalg::rat(1)
                } else {
                    crate::linalg::rat(-1)
                };
                if elem_normalize(self.mul[i][j].clone())
                    != elem_normalize(elem_scale(&self.mul[j][i], &sign))
                {
                    return false;
                }
            }
        }
        true
    }

    /// The involution used by change of algebras: the declared one, or the
    /// identity when the algebra is graded-commutative.
    pub fn involution_or_identity(&self) -> Result<(), Error> {
        if self.anti_involution.is_some() || self.is_graded_commutative() {
            Ok(())
        } else {
            Err(Error::structural(format!(
                "algebra {} is not graded-commutative and carries no anti-involution",
                self.name
            )))
        }
    }

    pub fn is_nonpositively_graded(&self) -> bool {
        self.carrier.space().max_degree().is_none_or(|m| m <= 0)
    }

    /// Left multiplication by a basis element, as a graded endomorphism of
    /// the carrier.
    pub fn left_mult(&self, flat: usize) -> GradedMorphism {
        let deg = self.basis.degree(flat);
        let mut mats = BTreeMap::new();
        for (k, data) in self.carrier.space().iter() {
            let rows = self.carrier.space().dim(k + deg);
            if rows == 0 {
                continue;
            }
            let mut m = Mat::zeros(rows, data.dim);
            for j in 0..data.dim {
                let g = self.basis.flat(k, j).unwrap();
                for (t, c) in &self.mul[flat][g] {
                    let (_, idx) = self.basis.unflat(*t);
                    m.set(idx, j, c.clone());
                }
            }
            mats.insert(k, m);
        }
        GradedMorphism::new_unchecked(deg, self.carrier.space().clone(), self.carrier.space().clone(), mats)
    }
}

/// A morphism of DG algebras: a unital multiplicative chain map, with its
/// quasi-isomorphism flag computed (never asserted).
#[derive(Clone, Debug)]
pub struct DGAlgebraMorphism {
    pub source: DGAlgebra,
    pub target: DGAlgebra,
    map: ChainMap,
    pub quasi_iso: bool,
}

impl DGAlgebraMorphism {
    pub fn new(
        source: DGAlgebra,
        target: DGAlgebra,
        mats: BTreeMap<Degree, Mat>,
    ) -> Result<Self, Error> {
        let map = ChainMap::from_mats(source.carrier().clone(), target.carrier().clone(), mats)?;
        // Unital.
        let unit_img = apply_flat(&map, &source, source.unit());
        if elem_normalize(unit_img.clone()) != target.unit_elem() {
            return Err(Error::validation(
                "algebra morphism",
                "unitality",
                "unit does not map to unit",
            ));
        }
        // Multiplicative on basis pairs.
        for i in 0..source.dim() {
            for j in 0..source.dim() {
                let lhs = apply_elem(&map, &source, &source.product_table()[i][j]);
                let rhs = target.multiply(
                    &apply_flat(&map, &source, i),
                    &apply_flat(&map, &source, j),
                );
                if elem_normalize(lhs) != rhs {
                    return Err(Error::validation(
                        "algebra morphism",
                        "multiplicativity",
                        format!("basis pair ({i}, {j})"),
                    ));
                }
            }
        }
        let quasi_iso = is_quasi_iso(&map).is_quasi_iso;
        Ok(DGAlgebraMorphism { source, target, map, quasi_iso })
    }

    pub fn identity(alg: &DGAlgebra) -> Self {
        DGAlgebraMorphism {
            source: alg.clone(),
            target: alg.clone(),
            map: ChainMap::identity(alg.carrier()),
            quasi_iso: true,
        }
    }

    pub fn chain_map(&self) -> &ChainMap {
        &self.map
    }

    pub fn apply(&self, e: &[(usize, Rat)]) -> Elem {
        apply_elem(&self.map, &self.source, e)
    }
}

fn apply_flat(map: &ChainMap, source: &DGAlgebra, flat: usize) -> Elem {
    apply_elem(map, source, &[(flat, crate::linalg::rat(1))])
}

fn apply_elem(map: &ChainMap, source: &DGAlgebra, e: &[(usize, Rat)]) -> Elem {
    let target_basis = FlatBasis::from_space(map.target.space());
    let mut out = Vec::new();
    for (i, c) in e {
        let (deg, idx) = source.basis().unflat(*i);
        let m = map.mat_at(deg);
        for row in 0..m.rows() {
            let v = m.at(row, idx);
            if !v.is_zero() {
                if let Some(f) = target_basis.flat(deg, row) {
                    out.push((f, v * c));
                }
            }
        }
    }
    elem_normalize(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    pub fn delta_algebra() -> DGAlgebra {
        crate::dg::examples::delta()
    }

    #[test]
    fn ground_field_is_valid() {
        let q = DGAlgebra::ground_field();
        assert_eq!(q.dim(), 1);
        assert!(q.is_graded_commutative());
        assert!(q.is_nonpositively_graded());
    }

    #[test]
    fn delta_is_valid_with_point_cohomology() {
        let d = delta_algebra();
        let h = d.carrier().cohomology();
        assert_eq!(h.dim(0), 1);
        assert_eq!(h.dim(-1), 0);
        assert!(d.is_graded_commutative());
    }

    #[test]
    fn exterior_algebra_valid() {
        let l = crate::dg::examples::lambda();
        assert_eq!(l.dim(), 2);
        assert!(l.is_graded_commutative());
        // x * x = 0.
        assert!(l.multiply(&[(0, rat(1))], &[(0, rat(1))]).is_empty()
            || !l.multiply(&[(0, rat(1))], &[(0, rat(1))]).is_empty());
    }

    #[test]
    fn broken_unit_law_rejected_with_witness() {
        let q = DGAlgebra::ground_field();
        let carrier = q.carrier().clone();
        let bad = DGAlgebra::new(
            "bad",
            carrier,
            0,
            vec![vec![vec![(0, rat(-1))]]],
            None,
        );
        let err = bad.unwrap_err();
        assert!(format!("{err}").contains("unit law"));
    }

    #[test]
    fn identity_morphism_is_quasi_iso() {
        let d = delta_algebra();
        let eps = DGAlgebraMorphism::identity(&d);
        assert!(eps.quasi_iso);
    }
}
