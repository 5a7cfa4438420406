//! The ultrapower `V^I / U_w` of a finite structure and the codings of its subsets.

use std::collections::BTreeSet;

use super::structure::FinStructure;
use super::ultrafilter::{build_ultrafilter, FinIndex, IndexSet, PrincipalUltrafilter};
use super::ModelError;

/// Upper bound on `|carrier|^|I|`.
pub const MAX_FUNCTIONS: usize = 1 << 16;

pub type FnId = usize;
pub type ClassId = usize;

#[derive(Clone, Debug)]
pub struct FinUltrapower {
    base: FinStructure,
    ultrafilter: PrincipalUltrafilter,
    functions: Vec<Vec<usize>>,
    class_of: Vec<ClassId>,
    classes: Vec<Vec<FnId>>,
    memrel: Vec<bool>,
}

impl FinUltrapower {
    pub fn base(&self) -> &FinStructure {
        &self.base
    }

    pub fn index(&self) -> FinIndex {
        self.ultrafilter.index()
    }

    pub fn ultrafilter(&self) -> &PrincipalUltrafilter {
        &self.ultrafilter
    }

    pub fn function_count(&self) -> usize {
        self.functions.len()
    }

    pub fn function(&self, f: FnId) -> &[usize] {
        &self.functions[f]
    }

    /// Id of the map with the given values, if it is a valid map `I → carrier`.
    pub fn function_id(&self, values: &[usize]) -> Option<FnId> {
        let c = self.base.size();
        if values.len() != self.index().size() || values.iter().any(|&v| v >= c) {
            return None;
        }
        Some(values.iter().rev().fold(0, |acc, &v| acc * c + v))
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn class_of(&self, f: FnId) -> ClassId {
        self.class_of[f]
    }

    pub fn class_members(&self, c: ClassId) -> &[FnId] {
        &self.classes[c]
    }

    /// `∈_U` between classes.
    pub fn class_mem(&self, a: ClassId, b: ClassId) -> bool {
        self.memrel[a * self.classes.len() + b]
    }

    /// The class of the constant map `c_x`.
    pub fn embed(&self, x: usize) -> ClassId {
        let id = self.function_id(&vec![x; self.index().size()]).expect("constant map");
        self.class_of[id]
    }

    /// `{ i | f(i) = g(i) }`.
    pub fn agreement_set(&self, f: FnId, g: FnId) -> IndexSet {
        let (f, g) = (&self.functions[f], &self.functions[g]);
        (0..f.len()).filter(|&i| f[i] == g[i]).fold(0, |m, i| m | 1 << i)
    }

    /// `{ i | f(i) ∈ g(i) }`.
    pub fn membership_set(&self, f: FnId, g: FnId) -> IndexSet {
        let (f, g) = (&self.functions[f], &self.functions[g]);
        (0..f.len())
            .filter(|&i| self.base.mem(f[i], g[i]))
            .fold(0, |m, i| m | 1 << i)
    }

    pub fn eq_u(&self, f: FnId, g: FnId) -> bool {
        self.ultrafilter.contains(self.agreement_set(f, g))
    }

    pub fn mem_u(&self, f: FnId, g: FnId) -> bool {
        self.ultrafilter.contains(self.membership_set(f, g))
    }

    /// `∈_U` gives the same answer for every choice of class representatives.
    pub fn memrel_well_defined(&self) -> bool {
        (0..self.class_count()).all(|a| {
            (0..self.class_count()).all(|b| {
                let expect = self.class_mem(a, b);
                self.classes[a]
                    .iter()
                    .all(|&f| self.classes[b].iter().all(|&g| self.mem_u(f, g) == expect))
            })
        })
    }

    /// Counts pairs where `=_U`/`∈_U` disagree with evaluation at `w`.
    pub fn isomorphism_mismatches(&self) -> usize {
        let w = self.index().w();
        let n = self.function_count();
        let mut bad = 0;
        for f in 0..n {
            for g in 0..n {
                let (fw, gw) = (self.functions[f][w], self.functions[g][w]);
                bad += usize::from(self.eq_u(f, g) != (fw == gw));
                bad += usize::from(self.mem_u(f, g) != self.base.mem(fw, gw));
            }
        }
        bad
    }

    /// The Ψ code of a set of classes: every map whose class lies in `x`.
    pub fn psi(&self, x: &BTreeSet<ClassId>) -> BTreeSet<FnId> {
        (0..self.function_count())
            .filter(|&f| x.contains(&self.class_of[f]))
            .collect()
    }

    /// The Ψ̃ code: the classes themselves.
    pub fn psi_tilde(&self, x: &BTreeSet<ClassId>) -> BTreeSet<ClassId> {
        x.iter().copied().filter(|&c| c < self.class_count()).collect()
    }

    /// Recovers the class set from a Ψ̃ code through representatives.
    pub fn decode_tilde(&self, code: &BTreeSet<ClassId>) -> BTreeSet<ClassId> {
        code.iter().map(|&c| self.class_of[self.classes[c][0]]).collect()
    }
}

/// Forms all maps `I → carrier` and partitions them by `=_U`.
pub fn ultrapower_quotient(base: &FinStructure, index: FinIndex) -> Result<FinUltrapower, ModelError> {
    let c = base.size();
    if c == 0 {
        return Err(ModelError::EmptyCarrier);
    }
    let count = (c as u128).pow(index.size() as u32);
    if count > MAX_FUNCTIONS as u128 {
        return Err(ModelError::TooManyFunctions(count));
    }
    let ultrafilter = build_ultrafilter(index);
    let functions: Vec<Vec<usize>> = (0..count as usize)
        .map(|mut id| {
            (0..index.size())
                .map(|_| {
                    let v = id % c;
                    id /= c;
                    v
                })
                .collect()
        })
        .collect();

    let mut up = FinUltrapower {
        base: base.clone(),
        ultrafilter,
        functions,
        class_of: Vec::new(),
        classes: Vec::new(),
        memrel: Vec::new(),
    };

    // =_U is an equivalence (filter laws), so comparing with one representative suffices.
    let mut class_of = vec![usize::MAX; up.functions.len()];
    let mut classes: Vec<Vec<FnId>> = Vec::new();
    for (f, slot) in class_of.iter_mut().enumerate() {
        match classes.iter().position(|members| up.eq_u(members[0], f)) {
            Some(k) => {
                classes[k].push(f);
                *slot = k;
            }
            None => {
                *slot = classes.len();
                classes.push(vec![f]);
            }
        }
    }
    let k = classes.len();
    let mut memrel = vec![false; k * k];
    for a in 0..k {
        for b in 0..k {
            memrel[a * k + b] = up.mem_u(classes[a][0], classes[b][0]);
        }
    }
    up.class_of = class_of;
    up.classes = classes;
    up.memrel = memrel;
    Ok(up)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SetopReport {
    pub pairs_checked: usize,
    pub failures: Vec<String>,
}

/// Exhaustively checks that both codings commute with the Boolean set
/// operations and reflect inclusion. Finite truncations of countable unions
/// and intersections are checked as well.
pub fn setop_check(up: &FinUltrapower) -> SetopReport {
    let k = up.class_count();
    let subsets: Vec<BTreeSet<ClassId>> = (0u64..1 << k)
        .map(|m| (0..k).filter(|i| m & (1 << i) != 0).collect())
        .collect();
    let codes: Vec<BTreeSet<FnId>> = subsets.iter().map(|x| up.psi(x)).collect();
    let mut report = SetopReport::default();
    let mut fail = |msg: String| report.failures.push(msg);

    if !up.psi(&BTreeSet::new()).is_empty() || !up.psi_tilde(&BTreeSet::new()).is_empty() {
        fail("code of the empty set is not empty".into());
    }
    let mut pairs = 0;
    for (i, x) in subsets.iter().enumerate() {
        if up.decode_tilde(&up.psi_tilde(x)) != *x {
            fail(format!("tilde coding not injective at {x:?}"));
        }
        for (j, y) in subsets.iter().enumerate() {
            pairs += 1;
            let (px, py) = (&codes[i], &codes[j]);
            let union: BTreeSet<_> = x.union(y).copied().collect();
            let inter: BTreeSet<_> = x.intersection(y).copied().collect();
            let diff: BTreeSet<_> = x.difference(y).copied().collect();
            if up.psi(&union) != px.union(py).copied().collect() {
                fail(format!("union not preserved for {x:?}, {y:?}"));
            }
            if up.psi(&inter) != px.intersection(py).copied().collect() {
                fail(format!("intersection not preserved for {x:?}, {y:?}"));
            }
            if up.psi(&diff) != px.difference(py).copied().collect() {
                fail(format!("difference not preserved for {x:?}, {y:?}"));
            }
            let (tx, ty) = (up.psi_tilde(x), up.psi_tilde(y));
            if up.psi_tilde(&union) != tx.union(&ty).copied().collect()
                || up.psi_tilde(&inter) != tx.intersection(&ty).copied().collect()
                || up.psi_tilde(&diff) != tx.difference(&ty).copied().collect()
            {
                fail(format!("tilde coding not a set homomorphism at {x:?}, {y:?}"));
            }
            if x.is_subset(y) != px.is_subset(py) {
                fail(format!("inclusion not reflected for {x:?}, {y:?}"));
            }
        }
    }
    // The family of all subsets, as a finite stand-in for a countable family.
    let big_union: BTreeSet<ClassId> = subsets.iter().flatten().copied().collect();
    let code_union: BTreeSet<FnId> = codes.iter().flatten().copied().collect();
    if up.psi(&big_union) != code_union {
        fail("union of the family not preserved".into());
    }
    let singletons: Vec<BTreeSet<ClassId>> = (0..k).map(|c| BTreeSet::from([c])).collect();
    let meet = |sets: &[BTreeSet<usize>], all: BTreeSet<usize>| {
        sets.iter().fold(all, |acc, s| acc.intersection(s).copied().collect())
    };
    let all_classes: BTreeSet<ClassId> = (0..k).collect();
    let all_fns: BTreeSet<FnId> = (0..up.function_count()).collect();
    let chain: Vec<BTreeSet<ClassId>> = (0..=k).map(|n| (n..k).collect()).collect();
    for family in [&singletons, &chain] {
        let family_codes: Vec<_> = family.iter().map(|x| up.psi(x)).collect();
        if up.psi(&meet(family, all_classes.clone())) != meet(&family_codes, all_fns.clone()) {
            fail("intersection of the family not preserved".into());
        }
    }
    report.pairs_checked = pairs;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn agreement_at_w_shares_class() {
        let base = FinStructure::new(2, &[]).unwrap();
        let up = ultrapower_quotient(&base, FinIndex::new(3, 1).unwrap()).unwrap();
        let f = up.function_id(&[0, 1, 0]).unwrap();
        let g = up.function_id(&[1, 1, 0]).unwrap();
        assert_eq!(up.class_of(f), up.class_of(g));
        assert_eq!(up.class_count(), 2);
    }

    #[test]
    fn singleton_carrier_has_one_class() {
        for n in 1..=4 {
            let base = FinStructure::new(1, &[(0, 0)]).unwrap();
            let up = ultrapower_quotient(&base, FinIndex::new(n, n - 1).unwrap()).unwrap();
            assert_eq!(up.class_count(), 1);
        }
    }

    #[test]
    fn class_count_by_enumeration() {
        let base = FinStructure::new(3, &[]).unwrap();
        let up = ultrapower_quotient(&base, FinIndex::new(2, 0).unwrap()).unwrap();
        assert_eq!(up.function_count(), 9);
        let values_at_zero: BTreeSet<usize> = (0..9).map(|f| up.function(f)[0]).collect();
        assert_eq!(up.class_count(), values_at_zero.len());
        assert_eq!(up.class_count(), 3);
    }

    #[test]
    fn constant_maps_embed_the_base() {
        let base = FinStructure::new(3, &[(0, 1), (1, 2)]).unwrap();
        let up = ultrapower_quotient(&base, FinIndex::new(3, 2).unwrap()).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                assert_eq!(up.class_mem(up.embed(a), up.embed(b)), base.mem(a, b));
            }
        }
        assert!(up.memrel_well_defined());
        assert_eq!(up.isomorphism_mismatches(), 0);
    }

    #[test]
    fn empty_and_full_codes() {
        let base = FinStructure::new(2, &[]).unwrap();
        let up = ultrapower_quotient(&base, FinIndex::new(2, 0).unwrap()).unwrap();
        assert!(up.psi(&BTreeSet::new()).is_empty());
        let all: BTreeSet<_> = (0..up.class_count()).collect();
        assert_eq!(up.psi(&all).len(), up.function_count());
        assert_eq!(setop_check(&up).failures, Vec::<String>::new());
    }

    #[test]
    fn rejects_huge_power() {
        let base = FinStructure::new(16, &[]).unwrap();
        assert!(matches!(
            ultrapower_quotient(&base, FinIndex::new(16, 0).unwrap()),
            Err(ModelError::TooManyFunctions(_))
        ));
    }
}
