use std::fmt;

use fixedbitset::FixedBitSet;

/// A set of interned place or transition indices. All sets belonging to one
/// net share the same universe size, so equality, hashing and ordering are
/// well defined between them.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IdSet(FixedBitSet);

impl IdSet {
    pub fn empty(universe: usize) -> Self {
        IdSet(FixedBitSet::with_capacity(universe))
    }

    pub fn from_iter(universe: usize, items: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(universe);
        for i in items {
            s.insert(i);
        }
        s
    }

    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, i: usize) {
        self.0.insert(i)
    }

    pub fn remove(&mut self, i: usize) {
        self.0.set(i, false)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.contains(i)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.0.ones().collect()
    }

    pub fn is_subset(&self, other: &IdSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &IdSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn union(&self, other: &IdSet) -> IdSet {
        let mut s = self.clone();
        s.0.union_with(&other.0);
        s
    }

    pub fn intersection(&self, other: &IdSet) -> IdSet {
        let mut s = self.clone();
        s.0.intersect_with(&other.0);
        s
    }

    pub fn difference(&self, other: &IdSet) -> IdSet {
        let mut s = self.clone();
        s.0.difference_with(&other.0);
        s
    }

    pub fn union_with(&mut self, other: &IdSet) {
        self.0.union_with(&other.0)
    }

    /// Canonical comparison key: the sorted member list. Used wherever output
    /// order has to be stable and human-predictable.
    pub fn key(&self) -> Vec<usize> {
        self.to_vec()
    }
}

impl fmt::Debug for IdSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// All subsets of `base`, in the order of the binary counter over its
/// members (lowest index is the least significant bit). The first item is
/// the empty set.
pub fn subsets(base: &IdSet) -> impl Iterator<Item = IdSet> + '_ {
    let members = base.to_vec();
    assert!(members.len() < 64, "too many elements to enumerate subsets");
    (0u64..(1u64 << members.len())).map(move |mask| {
        IdSet::from_iter(
            base.universe(),
            members.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &i)| i),
        )
    })
}
