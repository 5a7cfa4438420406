//! Exhaustive Łoś sweeps over all small models.
//!
//! Formulas use the two variables `x`, `y`. Instead of evaluating every
//! syntactic formula separately, each model's formulas are grouped by their
//! pair of truth tables (in the quotient and in the base); formulas with the
//! same pair produce identical checks. Each group remembers how many syntactic
//! formulas it stands for and how to rebuild one of them, so reports still
//! speak about concrete formulas.

use std::collections::HashMap;

use rayon::prelude::*;

use super::formula::{Formula, Interpretation, Var};
use super::quotient::{ultrapower_quotient, FinUltrapower};
use super::structure::FinStructure;
use super::ultrafilter::{mask_to_vec, FinIndex};
use super::ModelError;

/// Tables are `u64` masks over `(x, y)` pairs, so domains are capped at 8.
pub const MAX_SWEEP_DOMAIN: usize = 8;

#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    pub max_index: usize,
    pub max_carrier: usize,
    pub max_depth: usize,
    /// Also range over every unary relation `P` on the carrier.
    pub unary: bool,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Mismatch {
    pub model: String,
    pub formula: String,
    pub params: Vec<Vec<usize>>,
    pub quotient: bool,
    pub pointwise_set: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct SweepReport {
    pub models: u64,
    /// Syntactic formulas of depth ≤ bound, summed over models.
    pub formulas: u128,
    /// Formula × parameter instances covered, summed over models.
    pub instances: u128,
    /// Distinct (formula class × parameters) evaluations actually performed.
    pub evaluations: u64,
    /// Pairs of maps where `=_U`/`∈_U` disagree with evaluation at `w`.
    pub isomorphism_mismatches: u64,
    /// Models whose `∈_U` depends on the choice of representatives.
    pub ill_defined: u64,
    pub mismatches: Vec<Mismatch>,
}

impl SweepReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.isomorphism_mismatches == 0 && self.ill_defined == 0
    }

    fn merge(mut self, other: SweepReport) -> SweepReport {
        self.models += other.models;
        self.formulas += other.formulas;
        self.instances += other.instances;
        self.evaluations += other.evaluations;
        self.isomorphism_mismatches += other.isomorphism_mismatches;
        self.ill_defined += other.ill_defined;
        self.mismatches.extend(other.mismatches);
        self
    }
}

/// Number of syntactic formulas of depth ≤ `depth` with `atoms` atoms.
pub fn syntactic_formula_count(atoms: u128, depth: usize) -> u128 {
    let mut n = atoms;
    for _ in 0..depth {
        n = atoms + UNARY_OPS.len() as u128 * n + 2 * n * n;
    }
    n
}

/// Runs the sweep over every structure, index size and distinguished point
/// within the configured bounds.
pub fn sweep(cfg: SweepConfig) -> Result<SweepReport, ModelError> {
    if cfg.max_carrier == 0 || cfg.max_carrier > MAX_SWEEP_DOMAIN {
        return Err(ModelError::SweepBounds(format!(
            "carrier bound must be in 1..={MAX_SWEEP_DOMAIN}"
        )));
    }
    let mut jobs = Vec::new();
    for c in 1..=cfg.max_carrier {
        let relations = 1u64 << (c * c);
        let unaries: Vec<Option<u64>> = if cfg.unary {
            (0..1u64 << c).map(Some).collect()
        } else {
            vec![None]
        };
        for n in 1..=cfg.max_index {
            for w in 0..n {
                for rel in 0..relations {
                    for &p in &unaries {
                        jobs.push((c, rel, p, n, w));
                    }
                }
            }
        }
    }
    jobs.into_par_iter()
        .map(|(c, rel, p, n, w)| {
            let mut s = FinStructure::from_bits(c, rel)?;
            if let Some(bits) = p {
                s = s.with_unary("P", (0..c).map(|a| bits & (1 << a) != 0).collect())?;
            }
            check_model(&s, FinIndex::new(n, w)?, cfg.max_depth)
        })
        .try_reduce(SweepReport::default, |a, b| Ok(a.merge(b)))
}

/// Checks every formula of depth ≤ `max_depth` at every pair of parameter maps.
pub fn check_model(base: &FinStructure, index: FinIndex, max_depth: usize) -> Result<SweepReport, ModelError> {
    if base.size() > MAX_SWEEP_DOMAIN {
        return Err(ModelError::SweepBounds(format!(
            "carrier of size {} exceeds {MAX_SWEEP_DOMAIN}",
            base.size()
        )));
    }
    let up = ultrapower_quotient(base, index)?;
    let quot = Side::of(&up);
    let pt = Side::of(base);
    let classes = enumerate_classes(&quot, &pt, base.unary_count(), max_depth);

    let nf = up.function_count();
    let n = index.size();
    let mut report = SweepReport {
        models: 1,
        isomorphism_mismatches: up.isomorphism_mismatches() as u64,
        ill_defined: u64::from(!up.memrel_well_defined()),
        ..Default::default()
    };
    let m = pt.m;
    // cell of the base table visited at index i by parameters (f, g)
    let cells: Vec<Vec<u8>> = (0..nf * nf)
        .map(|fg| {
            let (f, g) = (up.function(fg / nf), up.function(fg % nf));
            (0..n).map(|i| (f[i] * m + g[i]) as u8).collect()
        })
        .collect();
    let class_cell: Vec<usize> = (0..nf * nf)
        .map(|fg| up.class_of(fg / nf) * quot.m + up.class_of(fg % nf))
        .collect();

    for node in &classes.nodes {
        report.formulas += node.count;
        report.instances += node.count * (nf * nf) as u128;
        for fg in 0..nf * nf {
            report.evaluations += 1;
            let quotient = node.q & (1 << class_cell[fg]) != 0;
            let set = cells[fg]
                .iter()
                .enumerate()
                .filter(|(_, &cell)| node.b & (1 << cell) != 0)
                .fold(0u32, |s, (i, _)| s | 1 << i);
            if quotient != up.ultrafilter().contains(set) {
                report.mismatches.push(Mismatch {
                    model: describe(base, index),
                    formula: classes.rebuild(node).to_string(),
                    params: vec![up.function(fg / nf).to_vec(), up.function(fg % nf).to_vec()],
                    quotient,
                    pointwise_set: mask_to_vec(set),
                });
            }
        }
    }
    Ok(report)
}

fn describe(base: &FinStructure, index: FinIndex) -> String {
    let pairs: Vec<String> = (0..base.size())
        .flat_map(|a| (0..base.size()).map(move |b| (a, b)))
        .filter(|&(a, b)| base.mem(a, b))
        .map(|(a, b)| format!("{a}∈{b}"))
        .collect();
    format!(
        "carrier={} rel={{{}}} |I|={} w={}",
        base.size(),
        pairs.join(","),
        index.size(),
        index.w()
    )
}

/// A structure flattened for table arithmetic.
struct Side {
    m: usize,
    mem: Vec<bool>,
    unary: Vec<Vec<bool>>,
}

impl Side {
    fn of<S: Interpretation + HasUnaryCount>(s: &S) -> Side {
        let m = s.domain_size();
        Side {
            m,
            mem: (0..m * m).map(|i| s.mem(i / m, i % m)).collect(),
            unary: (0..s.unary_count())
                .map(|p| (0..m).map(|a| s.unary(p, a)).collect())
                .collect(),
        }
    }

    fn bit(t: u64, x: usize, y: usize, m: usize) -> bool {
        t & (1 << (x * m + y)) != 0
    }

    fn table(&self, f: impl Fn(usize, usize) -> bool) -> u64 {
        let m = self.m;
        (0..m * m).filter(|&i| f(i / m, i % m)).fold(0, |t, i| t | 1 << i)
    }

    fn atom(&self, a: &Atom) -> u64 {
        let m = self.m;
        let pick = |v: Var, x: usize, y: usize| if v == 0 { x } else { y };
        match *a {
            Atom::Mem(u, v) => self.table(|x, y| self.mem[pick(u, x, y) * m + pick(v, x, y)]),
            Atom::Eq(u, v) => self.table(|x, y| pick(u, x, y) == pick(v, x, y)),
            Atom::Unary(p, v) => self.table(|x, y| self.unary[p][pick(v, x, y)]),
        }
    }

    fn apply(&self, op: UnaryOp, t: u64) -> u64 {
        let m = self.m;
        let full = if m * m == 64 { u64::MAX } else { (1u64 << (m * m)) - 1 };
        // quantify over `bound` with the other variable `free`
        let quant = |bound: Var, existential: bool, restrict: bool| {
            self.table(|x, y| {
                let free = if bound == 0 { y } else { x };
                let mut hits = (0..m).filter(|&a| !restrict || self.mem[a * m + free]).map(|a| {
                    if bound == 0 {
                        Side::bit(t, a, free, m)
                    } else {
                        Side::bit(t, free, a, m)
                    }
                });
                if existential {
                    hits.any(|b| b)
                } else {
                    hits.all(|b| b)
                }
            })
        };
        match op {
            UnaryOp::Not => !t & full,
            UnaryOp::Exists(v) => quant(v, true, false),
            UnaryOp::Forall(v) => quant(v, false, false),
            UnaryOp::ExistsIn(v) => quant(v, true, true),
            UnaryOp::ForallIn(v) => quant(v, false, true),
        }
    }
}

trait HasUnaryCount {
    fn unary_count(&self) -> usize;
}

impl HasUnaryCount for FinStructure {
    fn unary_count(&self) -> usize {
        FinStructure::unary_count(self)
    }
}

impl HasUnaryCount for FinUltrapower {
    fn unary_count(&self) -> usize {
        self.base().unary_count()
    }
}

#[derive(Clone, Copy, Debug)]
enum Atom {
    Mem(Var, Var),
    Eq(Var, Var),
    Unary(usize, Var),
}

/// `ExistsIn(v)` binds `v` over the members of the other variable.
#[derive(Clone, Copy, Debug)]
enum UnaryOp {
    Not,
    Exists(Var),
    Forall(Var),
    ExistsIn(Var),
    ForallIn(Var),
}

const UNARY_OPS: [UnaryOp; 9] = [
    UnaryOp::Not,
    UnaryOp::Exists(0),
    UnaryOp::Exists(1),
    UnaryOp::Forall(0),
    UnaryOp::Forall(1),
    UnaryOp::ExistsIn(0),
    UnaryOp::ExistsIn(1),
    UnaryOp::ForallIn(0),
    UnaryOp::ForallIn(1),
];

#[derive(Clone, Copy, Debug)]
enum Derivation {
    Atom(Atom),
    Unary(UnaryOp, usize),
    And(usize, usize),
    Or(usize, usize),
}

#[derive(Clone, Debug)]
struct Node {
    q: u64,
    b: u64,
    count: u128,
    how: Derivation,
}

struct FormulaClasses {
    /// every node ever created (levels refer back into it)
    arena: Vec<Node>,
    /// the final level
    nodes: Vec<Node>,
}

impl FormulaClasses {
    fn rebuild(&self, node: &Node) -> Formula {
        match node.how {
            Derivation::Atom(Atom::Mem(a, b)) => Formula::Mem(a, b),
            Derivation::Atom(Atom::Eq(a, b)) => Formula::Eq(a, b),
            Derivation::Atom(Atom::Unary(p, a)) => Formula::Unary(p, a),
            Derivation::Unary(op, c) => {
                let body = Box::new(self.rebuild(&self.arena[c]));
                match op {
                    UnaryOp::Not => Formula::Not(body),
                    UnaryOp::Exists(v) => Formula::Exists(v, body),
                    UnaryOp::Forall(v) => Formula::Forall(v, body),
                    UnaryOp::ExistsIn(v) => Formula::ExistsIn(v, 1 - v, body),
                    UnaryOp::ForallIn(v) => Formula::ForallIn(v, 1 - v, body),
                }
            }
            Derivation::And(a, b) => self.rebuild(&self.arena[a]).and(self.rebuild(&self.arena[b])),
            Derivation::Or(a, b) => self.rebuild(&self.arena[a]).or(self.rebuild(&self.arena[b])),
        }
    }
}

fn enumerate_classes(quot: &Side, pt: &Side, unary_count: usize, depth: usize) -> FormulaClasses {
    let mut atoms = Vec::new();
    for (a, b) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        atoms.push(Atom::Mem(a, b));
        atoms.push(Atom::Eq(a, b));
    }
    for p in 0..unary_count {
        atoms.push(Atom::Unary(p, 0));
        atoms.push(Atom::Unary(p, 1));
    }

    let mut arena: Vec<Node> = Vec::new();
    // level: (q, b) -> arena index, counts are per level
    let mut level: Vec<usize> = Vec::new();
    let push_level = |arena: &mut Vec<Node>, map: &mut HashMap<(u64, u64), usize>, q: u64, b: u64, count: u128, how: Derivation, out: &mut Vec<usize>| {
        match map.get(&(q, b)) {
            Some(&i) => arena[i].count += count,
            None => {
                arena.push(Node { q, b, count, how });
                map.insert((q, b), arena.len() - 1);
                out.push(arena.len() - 1);
            }
        }
    };

    for d in 0..=depth {
        let mut map = HashMap::new();
        let mut next = Vec::new();
        for a in &atoms {
            push_level(&mut arena, &mut map, quot.atom(a), pt.atom(a), 1, Derivation::Atom(*a), &mut next);
        }
        if d > 0 {
            let prev: Vec<(u64, u64, u128)> = level.iter().map(|&i| (arena[i].q, arena[i].b, arena[i].count)).collect();
            for (pi, &(q, b, c)) in prev.iter().enumerate() {
                for op in UNARY_OPS {
                    let how = Derivation::Unary(op, level[pi]);
                    push_level(&mut arena, &mut map, quot.apply(op, q), pt.apply(op, b), c, how, &mut next);
                }
            }
            for (pi, &(q1, b1, c1)) in prev.iter().enumerate() {
                for (pj, &(q2, b2, c2)) in prev.iter().enumerate() {
                    let (i, j) = (level[pi], level[pj]);
                    push_level(&mut arena, &mut map, q1 & q2, b1 & b2, c1 * c2, Derivation::And(i, j), &mut next);
                    push_level(&mut arena, &mut map, q1 | q2, b1 | b2, c1 * c2, Derivation::Or(i, j), &mut next);
                }
            }
        }
        level = next;
    }
    let nodes = level.iter().map(|&i| arena[i].clone()).collect();
    FormulaClasses { arena, nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strucmodel::los_check;

    #[test]
    fn formula_counts_match_closed_form() {
        let base = FinStructure::new(2, &[(0, 1)]).unwrap();
        for depth in 0..=2 {
            let r = check_model(&base, FinIndex::new(2, 0).unwrap(), depth).unwrap();
            assert_eq!(r.formulas, syntactic_formula_count(8, depth));
        }
        assert_eq!(syntactic_formula_count(8, 1), 8 + 9 * 8 + 2 * 64);
    }

    #[test]
    fn rebuilt_witnesses_evaluate_like_their_tables() {
        // every rebuilt formula must agree with a direct los_check
        let base = FinStructure::new(2, &[(0, 1), (1, 1)]).unwrap();
        let index = FinIndex::new(3, 1).unwrap();
        let up = ultrapower_quotient(&base, index).unwrap();
        let classes = enumerate_classes(&Side::of(&up), &Side::of(&base), 0, 1);
        for node in &classes.nodes {
            let phi = classes.rebuild(node);
            for f in 0..up.function_count() {
                for g in 0..up.function_count() {
                    let r = los_check(&up, &phi, &[f, g], 1).unwrap();
                    let cell = up.class_of(f) * up.class_count() + up.class_of(g);
                    assert_eq!(r.quotient, node.q & (1 << cell) != 0, "{phi}");
                    assert!(r.agrees());
                }
            }
        }
    }

    #[test]
    fn small_sweep_is_clean() {
        let r = sweep(SweepConfig { max_index: 2, max_carrier: 2, max_depth: 1, unary: true }).unwrap();
        assert!(r.passed(), "{:?}", r.mismatches.first());
        // carriers 1 and 2 with all relations and unary predicates, |I| ∈ {1,2} with every w
        assert_eq!(r.models, (2 * 2 + 16 * 4) * 3);
    }

    #[test]
    fn bounds_are_validated() {
        let cfg = SweepConfig { max_index: 1, max_carrier: 9, max_depth: 0, unary: false };
        assert!(sweep(cfg).is_err());
    }
}
