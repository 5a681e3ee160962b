//! Group data for the equivariant layer: a split torus or a finite abelian
//! group, acting through weight gradings only. Group elements are never
//! materialized; a module "with K-action" is a weight-graded space.

use crate::error::Error;
use crate::graded::Weight;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupData {
    Torus { rank: usize },
    Finite { orders: Vec<i64> },
}

impl GroupData {
    pub fn validate(&self) -> Result<(), Error> {
        match self {
            GroupData::Torus { rank } => {
                if *rank == 0 {
                    return Err(Error::structural("torus rank must be positive"));
                }
            }
            GroupData::Finite { orders } => {
                if orders.is_empty() || orders.iter().any(|&n| n <= 0) {
                    return Err(Error::structural("finite group orders must be positive"));
                }
            }
        }
        Ok(())
    }

    /// The rank of the weight lattice carried by modules.
    pub fn weight_rank(&self) -> usize {
        match self {
            GroupData::Torus { rank } => *rank,
            GroupData::Finite { orders } => orders.len(),
        }
    }

    /// Dimension of the Lie algebra: positive for a torus, zero for a
    /// finite group.
    pub fn lie_rank(&self) -> usize {
        match self {
            GroupData::Torus { rank } => *rank,
            GroupData::Finite { .. } => 0,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupData::Finite { .. })
    }

    pub fn order(&self) -> Option<i64> {
        match self {
            GroupData::Torus { .. } => None,
            GroupData::Finite { orders } => Some(orders.iter().product()),
        }
    }

    /// Reduces a weight into canonical residues for finite groups; the
    /// identity on torus weights.
    pub fn normalize(&self, w: &Weight) -> Weight {
        match self {
            GroupData::Torus { .. } => w.clone(),
            GroupData::Finite { orders } => {
                w.iter().zip(orders).map(|(a, n)| a.rem_euclid(*n)).collect()
            }
        }
    }

    /// All characters of a finite group, in lexicographic order.
    pub fn characters(&self) -> Option<Vec<Weight>> {
        let GroupData::Finite { orders } = self else { return None };
        let mut out: Vec<Weight> = vec![Vec::new()];
        for &n in orders {
            let mut next = Vec::new();
            for prefix in &out {
                for a in 0..n {
                    let mut w = prefix.clone();
                    w.push(a);
                    next.push(w);
                }
            }
            out = next;
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn characters_of_z2_z3() {
        let g = GroupData::Finite { orders: vec![2, 3] };
        let chars = g.characters().unwrap();
        assert_eq!(chars.len(), 6);
        assert_eq!(chars[0], vec![0, 0]);
        assert_eq!(chars[5], vec![1, 2]);
        assert_eq!(g.normalize(&vec![-1, 7]), vec![1, 1]);
    }

    #[test]
    fn zero_orders_rejected() {
        assert!(GroupData::Finite { orders: vec![2, 0] }.validate().is_err());
        assert!(GroupData::Torus { rank: 0 }.validate().is_err());
        assert!(GroupData::Torus { rank: 2 }.validate().is_ok());
    }
}
