//! Cochain complexes of finite-dimensional graded spaces with degree +1
//! differentials, and their cohomology.

use std::collections::BTreeMap;

use num::Zero;

use crate::error::Error;
use crate::graded::{Degree, GradedSpace};
use crate::linalg::Mat;
use crate::morphism::GradedMorphism;

/// A complex: a graded space together with differentials `d^k: V^k -> V^{k+1}`
/// satisfying `d . d = 0` exactly. Validated at construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Complex {
    space: GradedSpace,
    d: BTreeMap<Degree, Mat>,
}

impl Complex {
    /// Validates dimensions, `d^2 = 0`, and weight equivariance of the
    /// differential when weights are present.
    pub fn new(space: GradedSpace, d: BTreeMap<Degree, Mat>) -> Result<Self, Error> {
        let mut kept = BTreeMap::new();
        for (k, m) in d {
            let (rows, cols) = (space.dim(k + 1), space.dim(k));
            if m.rows() != rows || m.cols() != cols {
                return Err(Error::validation(
                    "complex",
                    "differential shape",
                    format!("d^{k} is {}x{}, expected {}x{}", m.rows(), m.cols(), rows, cols),
                ));
            }
            if rows == 0 || cols == 0 {
                continue;
            }
            kept.insert(k, m);
        }
        let c = Complex { space, d: kept };
        c.check_d_squared()?;
        c.check_weights()?;
        Ok(c)
    }

    fn check_d_squared(&self) -> Result<(), Error> {
        for (&k, dk) in &self.d {
            if let Some(dk1) = self.d.get(&(k + 1)) {
                let prod = dk1.mul(dk)?;
                if !prod.is_zero() {
                    return Err(Error::validation(
                        "complex",
                        "d^2 = 0",
                        format!("fails at degree {k}"),
                    ));
                }
            }
        }
        Ok(())
    }

    fn check_weights(&self) -> Result<(), Error> {
        if !self.space.has_weights() {
            return Ok(());
        }
        for (&k, dk) in &self.d {
            let src = self.space.weights(k).unwrap();
            let tgt = self.space.weights(k + 1).unwrap();
            for i in 0..dk.rows() {
                for j in 0..dk.cols() {
                    if !dk.at(i, j).is_zero() && tgt[i] != src[j] {
                        return Err(Error::validation(
                            "complex",
                            "differential weight equivariance",
                            format!("d^{k} entry ({i},{j}) crosses weights"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn zero() -> Self {
        Complex { space: GradedSpace::empty(), d: BTreeMap::new() }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn dim(&self, k: Degree) -> usize {
        self.space.dim(k)
    }

    pub fn total_dim(&self) -> usize {
        self.space.total_dim()
    }

    pub fn d_at(&self, k: Degree) -> Mat {
        match self.d.get(&k) {
            Some(m) => m.clone(),
            None => Mat::zeros(self.space.dim(k + 1), self.space.dim(k)),
        }
    }

    pub fn d_entries(&self) -> &BTreeMap<Degree, Mat> {
        &self.d
    }

    /// The differential as a degree +1 graded endomorphism.
    pub fn diff(&self) -> GradedMorphism {
        GradedMorphism::new_unchecked(1, self.space.clone(), self.space.clone(), self.d.clone())
    }

    /// Shift by n: `self[n]^k = self^{k+n}` with differential `(-1)^n d`.
    pub fn shift(&self, n: i64) -> Complex {
        let space = self.space.shift(n);
        let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
        let d = self
            .d
            .iter()
            .map(|(&k, m)| (k - n, if sign == 1 { m.clone() } else { m.neg_mat() }))
            .collect();
        Complex { space, d }
    }

    /// Direct sum, left summand's basis first in every degree.
    pub fn direct_sum(&self, other: &Complex) -> Result<Complex, Error> {
        let space = self.space.direct_sum(&other.space)?;
        let mut d = BTreeMap::new();
        let degs: std::collections::BTreeSet<Degree> =
            self.d.keys().chain(other.d.keys()).copied().collect();
        for k in degs {
            let a = self.d_at(k);
            let b = other.d_at(k);
            let top = a.hstack(&Mat::zeros(a.rows(), b.cols()))?;
            let bot = Mat::zeros(b.rows(), a.cols()).hstack(&b)?;
            d.insert(k, top.vstack(&bot)?);
        }
        Complex::new(space, d)
    }

    pub fn is_acyclic(&self) -> bool {
        self.cohomology().dims.values().all(|&d| d == 0)
    }

    /// Per-degree cohomology dimensions and chosen representative cocycles.
    ///
    /// Representatives are deterministic: the image basis of `d^{k-1}` is
    /// extended to a basis of `ker d^k` by the first independent kernel
    /// columns.
    pub fn cohomology(&self) -> Cohomology {
        let mut dims = BTreeMap::new();
        let mut reps = BTreeMap::new();
        for k in self.space.support() {
            let dk = self.d_at(k);
            let ker = dk.kernel();
            let im = self.d_at(k - 1).image();
            let dim_h = ker.cols() - im.cols();
            dims.insert(k, dim_h);
            if dim_h == 0 {
                reps.insert(k, Mat::zeros(self.space.dim(k), 0));
                continue;
            }
            // Extend im by kernel columns: pivots of [im | ker] beyond the
            // image block select representatives.
            let aug = im.hstack(&ker).expect("cohomology stack");
            let pivots = aug.image_pivot_cols();
            let chosen: Vec<usize> =
                pivots.iter().filter(|&&p| p >= im.cols()).map(|&p| p - im.cols()).collect();
            reps.insert(k, ker.select_cols(&chosen));
        }
        Cohomology { dims, reps }
    }
}

/// Cohomology table: exact dimensions plus representative cocycles in the
/// ambient coordinates of each degree.
#[derive(Clone, Debug)]
pub struct Cohomology {
    pub dims: BTreeMap<Degree, usize>,
    pub reps: BTreeMap<Degree, Mat>,
}

impl Cohomology {
    pub fn dim(&self, k: Degree) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.values().sum()
    }
}

/// Builder used by validators and tests: raw data in, validated complex out.
pub fn validate_complex(
    space: GradedSpace,
    d: BTreeMap<Degree, Mat>,
) -> Result<Complex, Error> {
    Complex::new(space, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rat;

    pub fn one_by_one(v: i64) -> Mat {
        Mat::from_rows(vec![vec![rat(v)]]).unwrap()
    }

    #[test]
    fn zero_differential_valid() {
        let c = Complex::new(GradedSpace::from_dims(&[(0, 2), (3, 1)]), BTreeMap::new()).unwrap();
        assert_eq!(c.cohomology().dim(0), 2);
        assert_eq!(c.cohomology().dim(3), 1);
    }

    #[test]
    fn two_term_identity_acyclic() {
        let space = GradedSpace::from_dims(&[(0, 1), (1, 1)]);
        let mut d = BTreeMap::new();
        d.insert(0, one_by_one(1));
        let c = Complex::new(space, d).unwrap();
        assert!(c.is_acyclic());
    }

    #[test]
    fn d_squared_rejected_naming_degree() {
        let space = GradedSpace::from_dims(&[(0, 1), (1, 1), (2, 1)]);
        let mut d = BTreeMap::new();
        d.insert(0, one_by_one(1));
        d.insert(1, one_by_one(1));
        let err = Complex::new(space, d).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("d^2"), "{msg}");
        assert!(msg.contains("degree 0"), "{msg}");
    }

    #[test]
    fn delta_carrier_cohomology() {
        // Carrier of the acyclic augmented algebra: 1 (deg 0), x (deg -1),
        // y (deg 0) with dx = y. H is one-dimensional in degree 0.
        let space = GradedSpace::from_dims(&[(-1, 1), (0, 2)]);
        let mut d = BTreeMap::new();
        // Basis of degree 0: (1, y); dx = y.
        d.insert(-1, Mat::from_rows(vec![vec![rat(0)], vec![rat(1)]]).unwrap());
        let c = Complex::new(space, d).unwrap();
        let h = c.cohomology();
        assert_eq!(h.dim(0), 1);
        assert_eq!(h.dim(-1), 0);
    }

    #[test]
    fn shift_negates_differential() {
        let space = GradedSpace::from_dims(&[(0, 1), (1, 1)]);
        let mut d = BTreeMap::new();
        d.insert(0, one_by_one(2));
        let c = Complex::new(space, d).unwrap();
        let t = c.shift(1);
        assert_eq!(t.dim(-1), 1);
        assert_eq!(*t.d_at(-1).at(0, 0), rat(-2));
    }

    #[test]
    fn direct_sum_cohomology_adds() {
        let space = GradedSpace::from_dims(&[(0, 1), (1, 1)]);
        let mut d = BTreeMap::new();
        d.insert(0, one_by_one(1));
        let acyclic = Complex::new(space, d).unwrap();
        let line = Complex::new(GradedSpace::from_dims(&[(0, 1)]), BTreeMap::new()).unwrap();
        let s = acyclic.direct_sum(&line).unwrap();
        assert_eq!(s.cohomology().dim(0), 1);
        assert_eq!(s.cohomology().dim(1), 0);
    }
}
