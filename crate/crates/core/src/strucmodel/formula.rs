//! Bounded first-order formulas over `{∈, =}` and Łoś checking.

use std::fmt;

use super::quotient::{FinUltrapower, FnId};
use super::structure::FinStructure;
use super::ultrafilter::{mask_to_vec, IndexSet};
use super::ModelError;

pub type Var = u8;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Formula {
    Mem(Var, Var),
    Eq(Var, Var),
    Unary(usize, Var),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    /// `∃x ∈ y. φ`
    ExistsIn(Var, Var, Box<Formula>),
    /// `∀x ∈ y. φ`
    ForallIn(Var, Var, Box<Formula>),
}

impl std::ops::Not for Formula {
    type Output = Formula;

    fn not(self) -> Formula {
        Formula::Not(Box::new(self))
    }
}

impl Formula {
    pub fn and(self, rhs: Formula) -> Self {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Formula) -> Self {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn exists(v: Var, body: Formula) -> Self {
        Formula::Exists(v, Box::new(body))
    }

    pub fn forall(v: Var, body: Formula) -> Self {
        Formula::Forall(v, Box::new(body))
    }

    /// Height of the syntax tree; atoms have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Formula::Mem(..) | Formula::Eq(..) | Formula::Unary(..) => 0,
            Formula::Not(a)
            | Formula::Exists(_, a)
            | Formula::Forall(_, a)
            | Formula::ExistsIn(_, _, a)
            | Formula::ForallIn(_, _, a) => 1 + a.depth(),
            Formula::And(a, b) | Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// One more than the largest variable mentioned anywhere.
    pub fn var_span(&self) -> usize {
        let m = |v: &Var| *v as usize + 1;
        match self {
            Formula::Mem(a, b) | Formula::Eq(a, b) => m(a).max(m(b)),
            Formula::Unary(_, a) => m(a),
            Formula::Not(f) => f.var_span(),
            Formula::And(a, b) | Formula::Or(a, b) => a.var_span().max(b.var_span()),
            Formula::Exists(v, f) | Formula::Forall(v, f) => m(v).max(f.var_span()),
            Formula::ExistsIn(v, u, f) | Formula::ForallIn(v, u, f) => m(v).max(m(u)).max(f.var_span()),
        }
    }

    fn max_unary(&self) -> Option<usize> {
        match self {
            Formula::Unary(p, _) => Some(*p),
            Formula::Mem(..) | Formula::Eq(..) => None,
            Formula::Not(f)
            | Formula::Exists(_, f)
            | Formula::Forall(_, f)
            | Formula::ExistsIn(_, _, f)
            | Formula::ForallIn(_, _, f) => f.max_unary(),
            Formula::And(a, b) | Formula::Or(a, b) => a.max_unary().max(b.max_unary()),
        }
    }

    /// Truth in `s` under `env` (indexed by variable).
    pub fn eval<S: Interpretation + ?Sized>(&self, s: &S, env: &mut Vec<usize>) -> bool {
        match self {
            Formula::Mem(a, b) => s.mem(env[*a as usize], env[*b as usize]),
            Formula::Eq(a, b) => env[*a as usize] == env[*b as usize],
            Formula::Unary(p, a) => s.unary(*p, env[*a as usize]),
            Formula::Not(f) => !f.eval(s, env),
            Formula::And(a, b) => a.eval(s, env) && b.eval(s, env),
            Formula::Or(a, b) => a.eval(s, env) || b.eval(s, env),
            Formula::Exists(v, f) => quantify(s, env, *v, None, f, true),
            Formula::Forall(v, f) => quantify(s, env, *v, None, f, false),
            Formula::ExistsIn(v, u, f) => quantify(s, env, *v, Some(*u), f, true),
            Formula::ForallIn(v, u, f) => quantify(s, env, *v, Some(*u), f, false),
        }
    }
}

fn quantify<S: Interpretation + ?Sized>(
    s: &S,
    env: &mut Vec<usize>,
    v: Var,
    bound: Option<Var>,
    body: &Formula,
    existential: bool,
) -> bool {
    let slot = v as usize;
    let saved = env[slot];
    let bound_val = bound.map(|u| env[u as usize]);
    let mut result = !existential;
    for a in 0..s.domain_size() {
        if let Some(b) = bound_val {
            if !s.mem(a, b) {
                continue;
            }
        }
        env[slot] = a;
        if body.eval(s, env) == existential {
            result = existential;
            break;
        }
    }
    env[slot] = saved;
    result
}

fn var_name(v: Var) -> String {
    const NAMES: [&str; 4] = ["x", "y", "z", "u"];
    NAMES.get(v as usize).map_or_else(|| format!("v{v}"), |s| s.to_string())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = var_name;
        match self {
            Formula::Mem(a, b) => write!(f, "{} ∈ {}", n(*a), n(*b)),
            Formula::Eq(a, b) => write!(f, "{} = {}", n(*a), n(*b)),
            Formula::Unary(p, a) => write!(f, "P{p}({})", n(*a)),
            Formula::Not(a) => write!(f, "¬({a})"),
            Formula::And(a, b) => write!(f, "({a}) ∧ ({b})"),
            Formula::Or(a, b) => write!(f, "({a}) ∨ ({b})"),
            Formula::Exists(v, a) => write!(f, "∃{}. {a}", n(*v)),
            Formula::Forall(v, a) => write!(f, "∀{}. {a}", n(*v)),
            Formula::ExistsIn(v, u, a) => write!(f, "∃{}∈{}. {a}", n(*v), n(*u)),
            Formula::ForallIn(v, u, a) => write!(f, "∀{}∈{}. {a}", n(*v), n(*u)),
        }
    }
}

/// A finite domain with `∈` and unary relations.
pub trait Interpretation {
    fn domain_size(&self) -> usize;
    fn mem(&self, a: usize, b: usize) -> bool;
    fn unary(&self, p: usize, a: usize) -> bool;
}

impl Interpretation for FinStructure {
    fn domain_size(&self) -> usize {
        self.size()
    }
    fn mem(&self, a: usize, b: usize) -> bool {
        FinStructure::mem(self, a, b)
    }
    fn unary(&self, p: usize, a: usize) -> bool {
        FinStructure::unary(self, p, a)
    }
}

/// The quotient structure: classes with `∈_U`; unary relations lifted through the ultrafilter.
impl Interpretation for FinUltrapower {
    fn domain_size(&self) -> usize {
        self.class_count()
    }
    fn mem(&self, a: usize, b: usize) -> bool {
        self.class_mem(a, b)
    }
    fn unary(&self, p: usize, a: usize) -> bool {
        let f = self.function(self.class_members(a)[0]);
        let set = (0..f.len())
            .filter(|&i| self.base().unary(p, f[i]))
            .fold(0, |m, i| m | 1 << i);
        self.ultrafilter().contains(set)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LosReport {
    /// φ evaluated in the quotient at the parameter classes.
    pub quotient: bool,
    /// `{ i | base ⊨ φ[f(i)] }`.
    pub pointwise_set: IndexSet,
    /// Whether the pointwise set is in `U_w`.
    pub large: bool,
}

impl LosReport {
    pub fn agrees(&self) -> bool {
        self.quotient == self.large
    }

    /// The witnessing index set, present only on a mismatch.
    pub fn witness(&self) -> Option<Vec<usize>> {
        (!self.agrees()).then(|| mask_to_vec(self.pointwise_set))
    }
}

/// Evaluates both sides of Łoś's theorem for `φ` at parameter maps `params`
/// (assigned to variables `0, 1, …` in order).
pub fn los_check(
    up: &FinUltrapower,
    phi: &Formula,
    params: &[FnId],
    max_depth: usize,
) -> Result<LosReport, ModelError> {
    if phi.depth() > max_depth {
        return Err(ModelError::Malformed(format!(
            "depth {} exceeds the bound {max_depth}",
            phi.depth()
        )));
    }
    if let Some(p) = phi.max_unary() {
        if p >= up.base().unary_count() {
            return Err(ModelError::Malformed(format!("unknown unary relation P{p}")));
        }
    }
    if let Some(&bad) = params.iter().find(|&&f| f >= up.function_count()) {
        return Err(ModelError::Malformed(format!("parameter {bad} is not a map I → carrier")));
    }
    let span = phi.var_span();
    if params.len() < span {
        // bound variables may exceed the parameters; free ones may not
        if !free_vars_within(phi, params.len()) {
            return Err(ModelError::Malformed(format!(
                "formula has free variables beyond the {} parameters",
                params.len()
            )));
        }
    }
    let width = span.max(params.len());

    let mut env: Vec<usize> = params.iter().map(|&f| up.class_of(f)).collect();
    env.resize(width, 0);
    let quotient = phi.eval(up, &mut env);

    let mut set = 0;
    for i in 0..up.index().size() {
        let mut env: Vec<usize> = params.iter().map(|&f| up.function(f)[i]).collect();
        env.resize(width, 0);
        if phi.eval(up.base(), &mut env) {
            set |= 1 << i;
        }
    }
    Ok(LosReport {
        quotient,
        pointwise_set: set,
        large: up.ultrafilter().contains(set),
    })
}

fn free_vars_within(phi: &Formula, n: usize) -> bool {
    fn go(phi: &Formula, bound: &mut Vec<Var>, n: usize) -> bool {
        let ok = |v: &Var, bound: &Vec<Var>| (*v as usize) < n || bound.contains(v);
        match phi {
            Formula::Mem(a, b) | Formula::Eq(a, b) => ok(a, bound) && ok(b, bound),
            Formula::Unary(_, a) => ok(a, bound),
            Formula::Not(f) => go(f, bound, n),
            Formula::And(a, b) | Formula::Or(a, b) => go(a, bound, n) && go(b, bound, n),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(*v);
                let r = go(f, bound, n);
                bound.pop();
                r
            }
            Formula::ExistsIn(v, u, f) | Formula::ForallIn(v, u, f) => {
                if !ok(u, bound) {
                    return false;
                }
                bound.push(*v);
                let r = go(f, bound, n);
                bound.pop();
                r
            }
        }
    }
    go(phi, &mut Vec::new(), n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::strucmodel::{ultrapower_quotient, FinIndex};

    #[test]
    fn reflexive_equality_holds_everywhere() {
        let base = FinStructure::new(2, &[(0, 1)]).unwrap();
        let up = ultrapower_quotient(&base, FinIndex::new(3, 2).unwrap()).unwrap();
        let phi = Formula::Eq(0, 0);
        for f in 0..up.function_count() {
            let r = los_check(&up, &phi, &[f], 2).unwrap();
            assert!(r.quotient && r.large && r.agrees());
        }
    }

    #[test]
    fn membership_with_set_valued_carrier() {
        // carrier: 0 = ∅-like element "0", 1 = {}, 2 = {0}; only 0 ∈ 2
        let base = FinStructure::new(3, &[(0, 2)]).unwrap();
        let up = ultrapower_quotient(&base, FinIndex::new(3, 0).unwrap()).unwrap();
        let f = up.function_id(&[0, 0, 0]).unwrap();
        let g = up.function_id(&[2, 1, 2]).unwrap();
        let r = los_check(&up, &Formula::Mem(0, 1), &[f, g], 2).unwrap();
        assert_eq!(mask_to_vec(r.pointwise_set), vec![0, 2]);
        assert!(r.quotient);
        assert!(r.large);
        assert_eq!(r.witness(), None);
    }

    #[test]
    fn rejects_malformed() {
        let base = FinStructure::new(2, &[]).unwrap();
        let up = ultrapower_quotient(&base, FinIndex::new(2, 0).unwrap()).unwrap();
        let deep = !!!Formula::Eq(0, 0);
        assert!(matches!(los_check(&up, &deep, &[0], 2), Err(ModelError::Malformed(_))));
        assert!(matches!(los_check(&up, &Formula::Mem(0, 1), &[0], 2), Err(ModelError::Malformed(_))));
        assert!(matches!(los_check(&up, &Formula::Unary(0, 0), &[0], 2), Err(ModelError::Malformed(_))));
        let closed = Formula::exists(1, Formula::Mem(0, 1));
        assert!(los_check(&up, &closed, &[0], 2).is_ok());
    }

    #[test]
    fn quantifiers_range_over_classes() {
        let base = FinStructure::new(2, &[(0, 1)]).unwrap();
        let up = ultrapower_quotient(&base, FinIndex::new(2, 1).unwrap()).unwrap();
        // ∃y. x ∈ y holds exactly for x whose value at w is 0
        let phi = Formula::exists(1, Formula::Mem(0, 1));
        for f in 0..up.function_count() {
            let r = los_check(&up, &phi, &[f], 2).unwrap();
            assert_eq!(r.quotient, up.function(f)[1] == 0);
            assert!(r.agrees());
        }
    }
}
