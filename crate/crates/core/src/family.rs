//! Labeled families of subsets of one space.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::subset::Subset;

/// A labeled family `{U_s}` over a space with `universe` points. Labels are
/// unique; members may be empty; coverage is not required.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedFamily {
    universe: usize,
    labels: Vec<String>,
    sets: Vec<Subset>,
}

#[derive(Serialize, Deserialize)]
struct LabeledMember {
    label: String,
    members: Vec<usize>,
}

/// The cover JSON document.
#[derive(Serialize, Deserialize)]
pub struct FamilySpec {
    labels: Vec<LabeledMember>,
}

impl IndexedFamily {
    pub fn new(universe: usize, members: Vec<(String, Subset)>) -> Result<Self> {
        let mut labels = Vec::with_capacity(members.len());
        let mut sets = Vec::with_capacity(members.len());
        for (label, set) in members {
            if labels.contains(&label) {
                return Err(Error::InvalidFamily(format!("duplicate label `{label}`")));
            }
            let set = set
                .rehome(universe)
                .ok_or_else(|| Error::InvalidFamily(format!("member `{label}` has an index outside 0..{universe}")))?;
            labels.push(label);
            sets.push(set);
        }
        Ok(IndexedFamily { universe, labels, sets })
    }

    /// Convenience constructor from label/index-list pairs.
    pub fn from_lists<L: Into<String>, I: IntoIterator<Item = usize>>(
        universe: usize,
        members: impl IntoIterator<Item = (L, I)>,
    ) -> Result<Self> {
        let mut out = Vec::new();
        for (label, idx) in members {
            let label = label.into();
            let set = Subset::from_indices(universe, idx)
                .ok_or_else(|| Error::InvalidFamily(format!("member `{label}` has an index outside 0..{universe}")))?;
            out.push((label, set));
        }
        Self::new(universe, out)
    }

    pub fn empty(universe: usize) -> Self {
        IndexedFamily { universe, labels: Vec::new(), sets: Vec::new() }
    }

    pub fn push(&mut self, label: impl Into<String>, set: Subset) -> Result<()> {
        let label = label.into();
        if self.labels.contains(&label) {
            return Err(Error::InvalidFamily(format!("duplicate label `{label}`")));
        }
        let set =
            set.rehome(self.universe).ok_or_else(|| Error::InvalidFamily(format!("member `{label}` out of range")))?;
        self.labels.push(label);
        self.sets.push(set);
        Ok(())
    }

    pub fn from_spec(spec: FamilySpec, space: &FiniteMetricSpace) -> Result<Self> {
        Self::from_lists(space.len(), spec.labels.into_iter().map(|m| (m.label, m.members)))
    }

    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec {
            labels: self.iter().map(|(l, s)| LabeledMember { label: l.to_string(), members: s.to_vec() }).collect(),
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn sets(&self) -> &[Subset] {
        &self.sets
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn set(&self, i: usize) -> &Subset {
        &self.sets[i]
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn get(&self, label: &str) -> Option<&Subset> {
        self.position(label).map(|i| &self.sets[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Subset)> {
        self.labels.iter().map(String::as_str).zip(&self.sets)
    }

    pub fn union(&self) -> Subset {
        let mut u = Subset::empty(self.universe);
        for s in &self.sets {
            u.union_with(s);
        }
        u
    }

    pub fn covers(&self, a: &Subset) -> bool {
        a.is_subset(&self.union())
    }

    pub fn is_cover(&self) -> bool {
        self.union().is_full()
    }

    /// Family `{U_s ∩ A}` with the same labels.
    pub fn restrict(&self, a: &Subset) -> Self {
        IndexedFamily {
            universe: self.universe,
            labels: self.labels.clone(),
            sets: self.sets.iter().map(|s| s.intersection(a)).collect(),
        }
    }

    /// Same labels, members mapped through `f`.
    pub fn map_sets(&self, f: impl Fn(&Subset) -> Subset) -> Self {
        IndexedFamily { universe: self.universe, labels: self.labels.clone(), sets: self.sets.iter().map(f).collect() }
    }

    /// Drops empty members.
    pub fn pruned(&self) -> Self {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| !self.sets[i].is_empty()).collect();
        IndexedFamily {
            universe: self.universe,
            labels: keep.iter().map(|&i| self.labels[i].clone()).collect(),
            sets: keep.iter().map(|&i| self.sets[i].clone()).collect(),
        }
    }

    /// Transports the family to a subspace given by the new-to-old index map.
    pub fn pull_to_subspace(&self, index_map: &[usize]) -> Self {
        let m = index_map.len();
        IndexedFamily {
            universe: m,
            labels: self.labels.clone(),
            sets: self.sets.iter().map(|s| Subset::from_predicate(m, |a| s.contains(index_map[a]))).collect(),
        }
    }

    /// Short content fingerprint used as a family id in certificates.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.universe as u64).to_le_bytes());
        for (l, s) in self.iter() {
            h.update((l.len() as u64).to_le_bytes());
            h.update(l.as_bytes());
            h.update((s.len() as u64).to_le_bytes());
            for i in s.iter() {
                h.update((i as u64).to_le_bytes());
            }
        }
        hex::encode(&h.finalize()[..8])
    }

    /// Indices of members containing `x`, in label order.
    pub fn containing(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.sets[i].contains(x)).collect()
    }
}

impl Serialize for IndexedFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_spec().serialize(s)
    }
}
