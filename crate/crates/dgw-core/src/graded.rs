//! Finitely supported graded vector spaces, with optional integer weight
//! vectors on basis elements (rank-r weight lattice).

use std::collections::BTreeMap;

use crate::error::Error;

pub type Degree = i64;
pub type Weight = Vec<i64>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeData {
    pub dim: usize,
    pub labels: Vec<String>,
    pub weights: Option<Vec<Weight>>,
}

/// A graded space with finite support. Degrees with dimension zero are not
/// stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GradedSpace {
    degrees: BTreeMap<Degree, DegreeData>,
}

impl GradedSpace {
    pub fn empty() -> Self {
        GradedSpace::default()
    }

    /// Builds a space from per-degree data; zero-dimensional degrees are
    /// dropped, label lists are padded with generated names.
    pub fn new(data: BTreeMap<Degree, DegreeData>) -> Result<Self, Error> {
        let mut degrees = BTreeMap::new();
        let mut rank: Option<usize> = None;
        for (deg, mut d) in data {
            if d.dim == 0 {
                continue;
            }
            if d.labels.is_empty() {
                d.labels = (0..d.dim).map(|i| format!("e{}_{}", deg, i)).collect();
            }
            if d.labels.len() != d.dim {
                return Err(Error::structural(format!(
                    "degree {}: {} labels for dimension {}",
                    deg,
                    d.labels.len(),
                    d.dim
                )));
            }
            if let Some(w) = &d.weights {
                if w.len() != d.dim {
                    return Err(Error::structural(format!(
                        "degree {}: {} weight vectors for dimension {}",
                        deg,
                        w.len(),
                        d.dim
                    )));
                }
                for wv in w {
                    match rank {
                        None => rank = Some(wv.len()),
                        Some(r) if r != wv.len() => {
                            return Err(Error::structural("inconsistent weight rank"));
                        }
                        _ => {}
                    }
                }
            }
            degrees.insert(deg, d);
        }
        let space = GradedSpace { degrees };
        if space.degrees.values().any(|d| d.weights.is_some())
            && space.degrees.values().any(|d| d.weights.is_none())
        {
            return Err(Error::structural("weights must be given on all degrees or none"));
        }
        Ok(space)
    }

    /// An unweighted space from a dimension table.
    pub fn from_dims(dims: &[(Degree, usize)]) -> Self {
        let mut map = BTreeMap::new();
        for &(deg, dim) in dims {
            if dim > 0 {
                map.insert(deg, DegreeData { dim, labels: Vec::new(), weights: None });
            }
        }
        GradedSpace::new(map).expect("from_dims cannot fail")
    }

    pub fn dim(&self, deg: Degree) -> usize {
        self.degrees.get(&deg).map_or(0, |d| d.dim)
    }

    pub fn total_dim(&self) -> usize {
        self.degrees.values().map(|d| d.dim).sum()
    }

    pub fn support(&self) -> impl Iterator<Item = Degree> + '_ {
        self.degrees.keys().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    pub fn min_degree(&self) -> Option<Degree> {
        self.degrees.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<Degree> {
        self.degrees.keys().last().copied()
    }

    pub fn data(&self, deg: Degree) -> Option<&DegreeData> {
        self.degrees.get(&deg)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Degree, &DegreeData)> {
        self.degrees.iter().map(|(k, v)| (*k, v))
    }

    pub fn labels(&self, deg: Degree) -> &[String] {
        self.degrees.get(&deg).map_or(&[], |d| &d.labels)
    }

    pub fn weights(&self, deg: Degree) -> Option<&[Weight]> {
        self.degrees.get(&deg).and_then(|d| d.weights.as_deref())
    }

    pub fn has_weights(&self) -> bool {
        self.degrees.values().next().is_some_and(|d| d.weights.is_some())
    }

    pub fn weight_rank(&self) -> Option<usize> {
        self.degrees.values().find_map(|d| d.weights.as_ref().and_then(|w| w.first()).map(|v| v.len()))
    }

    /// Shift: `self[n]` has degree-`k` part equal to the old degree `k + n`.
    pub fn shift(&self, n: i64) -> GradedSpace {
        let degrees = self
            .degrees
            .iter()
            .map(|(&k, d)| (k - n, d.clone()))
            .collect();
        GradedSpace { degrees }
    }

    /// Direct sum; left summand's basis comes first in every degree.
    pub fn direct_sum(&self, other: &GradedSpace) -> Result<GradedSpace, Error> {
        let mut degrees = self.degrees.clone();
        for (&k, d) in &other.degrees {
            match degrees.get_mut(&k) {
                None => {
                    degrees.insert(k, d.clone());
                }
                Some(existing) => {
                    existing.dim += d.dim;
                    existing.labels.extend(d.labels.iter().cloned());
                    match (&mut existing.weights, &d.weights) {
                        (None, None) => {}
                        (Some(a), Some(b)) => a.extend(b.iter().cloned()),
                        _ => {
                            return Err(Error::structural(
                                "direct sum mixes weighted and unweighted spaces",
                            ))
                        }
                    }
                }
            }
        }
        Ok(GradedSpace { degrees })
    }

    /// Forgets weights.
    pub fn unweighted(&self) -> GradedSpace {
        let degrees = self
            .degrees
            .iter()
            .map(|(&k, d)| (k, DegreeData { dim: d.dim, labels: d.labels.clone(), weights: None }))
            .collect();
        GradedSpace { degrees }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_moves_degrees() {
        let s = GradedSpace::from_dims(&[(0, 2), (1, 3)]);
        let t = s.shift(1);
        assert_eq!(t.dim(-1), 2);
        assert_eq!(t.dim(0), 3);
        assert_eq!(t.dim(1), 0);
    }

    #[test]
    fn direct_sum_left_first() {
        let mut a = BTreeMap::new();
        a.insert(0, DegreeData { dim: 1, labels: vec!["a".into()], weights: None });
        let a = GradedSpace::new(a).unwrap();
        let mut b = BTreeMap::new();
        b.insert(0, DegreeData { dim: 1, labels: vec!["b".into()], weights: None });
        let b = GradedSpace::new(b).unwrap();
        let s = a.direct_sum(&b).unwrap();
        assert_eq!(s.labels(0), &["a".to_string(), "b".to_string()]);
    }

    #[test]
    fn weight_rank_must_agree() {
        let mut m = BTreeMap::new();
        m.insert(
            0,
            DegreeData { dim: 2, labels: Vec::new(), weights: Some(vec![vec![1], vec![0, 1]]) },
        );
        assert!(GradedSpace::new(m).is_err());
    }
}
