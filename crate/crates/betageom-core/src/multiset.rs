//! Finite multisets of nonnegative reals, stored in canonical sorted order.

use alloc::vec::Vec;

use crate::error::{domain, Result};

/// A multiset of nonnegative reals.
///
/// Elements are kept sorted with duplicates preserved, so two multisets with
/// the same elements compare equal and iterate identically. That makes any
/// function of a multiset bit-identical under permutation of its input.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GammaMultiset {
    elems: Vec<f64>,
}

impl GammaMultiset {
    pub fn new<I: IntoIterator<Item = f64>>(items: I) -> Result<Self> {
        let mut elems: Vec<f64> = items.into_iter().collect();
        if let Some(bad) = elems.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(domain!("multiset entries must be finite and nonnegative, got {bad}"));
        }
        elems.sort_by(f64::total_cmp);
        Ok(Self { elems })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.elems
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.elems.iter().copied()
    }

    pub fn sum(&self) -> f64 {
        self.elems.iter().sum()
    }

    /// Disjoint union: multiplicities add.
    pub fn union(&self, other: &Self) -> Self {
        let mut elems = Vec::with_capacity(self.len() + other.len());
        elems.extend_from_slice(&self.elems);
        elems.extend_from_slice(&other.elems);
        elems.sort_by(f64::total_cmp);
        Self { elems }
    }

    /// Every element multiplied by `factor` (which must be nonnegative).
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            elems: self.elems.iter().map(|v| v * factor).collect(),
        }
    }

    /// The multiset with the element at sorted position `i` removed.
    pub fn without(&self, i: usize) -> Self {
        let mut elems = self.elems.clone();
        elems.remove(i);
        Self { elems }
    }

    /// True when all elements agree within `1e-12`.
    pub fn is_constant(&self) -> bool {
        match (self.elems.first(), self.elems.last()) {
            (Some(a), Some(b)) => (b - a).abs() <= 1e-12,
            _ => true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_insensitive() {
        let a = GammaMultiset::new([3.0, 1.0, 2.0, 1.0]).unwrap();
        let b = GammaMultiset::new([1.0, 2.0, 1.0, 3.0]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.as_slice(), &[1.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn union_adds_multiplicities() {
        let a = GammaMultiset::new([1.0, 2.0]).unwrap();
        let b = GammaMultiset::new([2.0]).unwrap();
        assert_eq!(a.union(&b).as_slice(), &[1.0, 2.0, 2.0]);
    }

    #[test]
    fn rejects_negative() {
        assert!(GammaMultiset::new([0.5, -0.1]).is_err());
        assert!(GammaMultiset::new([f64::NAN]).is_err());
    }
}
