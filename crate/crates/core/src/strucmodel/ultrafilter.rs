use std::collections::BTreeSet;

use super::ModelError;

/// Largest index set the oracle accepts (subsets are `u32` masks).
pub const MAX_INDEX: usize = 16;

/// A subset of the index set, bit `i` set iff `i` is a member.
pub type IndexSet = u32;

/// The finite index set `{0, …, size-1}` with its distinguished point.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct FinIndex {
    size: usize,
    w: usize,
}

impl FinIndex {
    pub fn new(size: usize, w: usize) -> Result<Self, ModelError> {
        if size == 0 || size > MAX_INDEX {
            return Err(ModelError::IndexSize(size));
        }
        if w >= size {
            return Err(ModelError::PointOutsideIndex { w, size });
        }
        Ok(FinIndex { size, w })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn full(&self) -> IndexSet {
        ((1u64 << self.size) - 1) as IndexSet
    }

    pub fn subsets(&self) -> impl Iterator<Item = IndexSet> {
        0..=self.full()
    }
}

/// The principal ultrafilter generated by the distinguished point.
#[derive(Clone, Debug)]
pub struct PrincipalUltrafilter {
    index: FinIndex,
    members: BTreeSet<IndexSet>,
}

impl PrincipalUltrafilter {
    pub fn index(&self) -> FinIndex {
        self.index
    }

    pub fn members(&self) -> &BTreeSet<IndexSet> {
        &self.members
    }

    /// Largeness, answered from the stored family rather than by testing `w`.
    pub fn contains(&self, set: IndexSet) -> bool {
        self.members.contains(&set)
    }

    /// Checks the filter and ultra laws by enumeration.
    pub fn is_ultrafilter(&self) -> bool {
        let full = self.index.full();
        if self.contains(0) || !self.contains(full) {
            return false;
        }
        self.index.subsets().all(|x| {
            let upward = !self.contains(x)
                || self.index.subsets().filter(|y| x & y == x).all(|y| self.contains(y));
            let meets = !self.contains(x)
                || self.members.iter().all(|&y| self.contains(x & y));
            let ultra = self.contains(x) || self.contains(full & !x);
            upward && meets && ultra
        })
    }
}

pub fn build_ultrafilter(index: FinIndex) -> PrincipalUltrafilter {
    let point = 1 << index.w();
    let members = index.subsets().filter(|s| s & point != 0).collect();
    PrincipalUltrafilter { index, members }
}

pub fn mask_to_vec(set: IndexSet) -> Vec<usize> {
    (0..32).filter(|i| set & (1 << i) != 0).collect()
}
