use std::fmt;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A set of point indices of a space with `universe` points.
///
/// Serialized as a sorted list of indices; the universe size travels with the
/// owning space rather than with the subset.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subset {
    bits: FixedBitSet,
}

impl Subset {
    pub fn empty(universe: usize) -> Self {
        Subset { bits: FixedBitSet::with_capacity(universe) }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        Subset { bits }
    }

    /// Builds a subset from indices; indices `>= universe` are rejected.
    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> Option<Self> {
        let mut s = Subset::empty(universe);
        for i in indices {
            if i >= universe {
                return None;
            }
            s.bits.insert(i);
        }
        Some(s)
    }

    pub fn from_predicate(universe: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        let mut s = Subset::empty(universe);
        for i in 0..universe {
            if pred(i) {
                s.bits.insert(i);
            }
        }
        s
    }

    pub fn singleton(universe: usize, i: usize) -> Self {
        let mut s = Subset::empty(universe);
        s.bits.insert(i);
        s
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.bits.contains(i)
    }

    pub fn insert(&mut self, i: usize) {
        self.bits.insert(i);
    }

    pub fn remove(&mut self, i: usize) {
        self.bits.set(i, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn first(&self) -> Option<usize> {
        self.bits.minimum()
    }

    pub fn complement(&self) -> Subset {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        Subset { bits }
    }

    pub fn union(&self, other: &Subset) -> Subset {
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Subset { bits }
    }

    pub fn intersection(&self, other: &Subset) -> Subset {
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Subset { bits }
    }

    pub fn difference(&self, other: &Subset) -> Subset {
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Subset { bits }
    }

    pub fn union_with(&mut self, other: &Subset) {
        self.bits.union_with(&other.bits);
    }

    pub fn is_subset(&self, other: &Subset) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn is_disjoint(&self, other: &Subset) -> bool {
        self.bits.is_disjoint(&other.bits)
    }

    pub fn intersects(&self, other: &Subset) -> bool {
        !self.is_disjoint(other)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl Serialize for Subset {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// Deserializes into a subset whose universe is one past the largest index.
/// Callers re-home it with [`Subset::rehome`] once the space is known.
impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v: Vec<usize> = Vec::deserialize(deserializer)?;
        let universe = v.iter().max().map_or(0, |m| m + 1);
        Ok(Subset::from_indices(universe, v).expect("indices below computed universe"))
    }
}

impl Subset {
    /// Moves the subset into a universe of `universe` points; `None` if some
    /// member does not fit.
    pub fn rehome(&self, universe: usize) -> Option<Subset> {
        Subset::from_indices(universe, self.iter())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = Subset::from_indices(6, [0, 1, 2]).unwrap();
        let b = Subset::from_indices(6, [2, 3]).unwrap();
        assert_eq!(a.union(&b).to_vec(), vec![0, 1, 2, 3]);
        assert_eq!(a.intersection(&b).to_vec(), vec![2]);
        assert_eq!(a.difference(&b).to_vec(), vec![0, 1]);
        assert_eq!(a.complement().to_vec(), vec![3, 4, 5]);
        assert!(Subset::empty(6).is_subset(&a));
        assert!(Subset::full(6).is_full());
        assert!(Subset::from_indices(3, [3]).is_none());
    }

    #[test]
    fn serde_is_index_list() {
        let a = Subset::from_indices(10, [7, 1]).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), "[1,7]");
        let back: Subset = serde_json::from_str("[1,7]").unwrap();
        assert_eq!(back.rehome(10).unwrap(), a);
    }
}
