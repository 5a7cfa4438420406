//! Codes of external subsets of the germ universe.
//!
//! An external set such as "the limited germs" is represented by the predicate
//! that carves it out. In the germ fragment each germ is its own defining
//! function, so the code of a set is determined by which germs satisfy the
//! predicate; set operations on codes are Boolean operations on predicates.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::germfield::{ExpSeq, ExtendedShadow, GermError, RatFn};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodingError {
    #[error("universe mismatch: `{0}` vs `{1}`")]
    UniverseMismatch(String, String),
    #[error("family is not monotone as required: {0}")]
    NonMonotone(String),
    #[error("no witness index found up to {0}")]
    NoWitness(u64),
    #[error(transparent)]
    Germ(#[from] GermError),
}

/// One side of a germ interval.
///
/// The halo variants are what countable unions and intersections of
/// standard intervals produce: `HaloOpen(c)` on the lower side admits only
/// germs above `c` and not infinitely close to it, `HaloClosed(c)` admits
/// everything at or above `c` plus the whole monad of `c`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Bound<T> {
    Unbounded,
    Closed(RatFn<T>),
    Open(RatFn<T>),
    HaloClosed(RatFn<T>),
    HaloOpen(RatFn<T>),
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GermInterval<T> {
    pub lo: Bound<T>,
    pub hi: Bound<T>,
}

impl<T: Scalar> GermInterval<T> {
    pub fn closed(lo: RatFn<T>, hi: RatFn<T>) -> Self {
        GermInterval { lo: Bound::Closed(lo), hi: Bound::Closed(hi) }
    }

    pub fn new(lo: RatFn<T>, lo_closed: bool, hi: RatFn<T>, hi_closed: bool) -> Self {
        let b = |g, closed| if closed { Bound::Closed(g) } else { Bound::Open(g) };
        GermInterval { lo: b(lo, lo_closed), hi: b(hi, hi_closed) }
    }

    pub fn contains(&self, x: &RatFn<T>) -> bool {
        above(&self.lo, x) && below(&self.hi, x)
    }
}

fn above<T: Scalar>(b: &Bound<T>, x: &RatFn<T>) -> bool {
    match b {
        Bound::Unbounded => true,
        Bound::Closed(c) => x >= c,
        Bound::Open(c) => x > c,
        Bound::HaloClosed(c) => x >= c || x.infinitely_close(c),
        Bound::HaloOpen(c) => x > c && !x.infinitely_close(c),
    }
}

fn below<T: Scalar>(b: &Bound<T>, x: &RatFn<T>) -> bool {
    match b {
        Bound::Unbounded => true,
        Bound::Closed(c) => x <= c,
        Bound::Open(c) => x < c,
        Bound::HaloClosed(c) => x <= c || x.infinitely_close(c),
        Bound::HaloOpen(c) => x < c && !x.infinitely_close(c),
    }
}

/// A decidable predicate on germs.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum GermPredicate<T> {
    Empty,
    All,
    Limited,
    Infinitesimal,
    Standard,
    Interval(GermInterval<T>),
    Not(Box<GermPredicate<T>>),
    And(Box<GermPredicate<T>>, Box<GermPredicate<T>>),
    Or(Box<GermPredicate<T>>, Box<GermPredicate<T>>),
}

impl<T: Scalar> GermPredicate<T> {
    pub fn holds(&self, x: &RatFn<T>) -> bool {
        match self {
            GermPredicate::Empty => false,
            GermPredicate::All => true,
            GermPredicate::Limited => x.classify().is_limited(),
            GermPredicate::Infinitesimal => x.classify().is_infinitesimal(),
            GermPredicate::Standard => x.classify().is_standard(),
            GermPredicate::Interval(i) => i.contains(x),
            GermPredicate::Not(p) => !p.holds(x),
            GermPredicate::And(a, b) => a.holds(x) && b.holds(x),
            GermPredicate::Or(a, b) => a.holds(x) || b.holds(x),
        }
    }

    pub fn and(self, rhs: Self) -> Self {
        GermPredicate::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Self) -> Self {
        GermPredicate::Or(Box::new(self), Box::new(rhs))
    }

    pub fn interval(i: GermInterval<T>) -> Self {
        GermPredicate::Interval(i)
    }
}

fn fmt_bound<T: Scalar>(b: &Bound<T>, lower: bool, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match (b, lower) {
        (Bound::Unbounded, true) => write!(f, "(-inf"),
        (Bound::Unbounded, false) => write!(f, "+inf)"),
        (Bound::Closed(c), true) => write!(f, "[{c}"),
        (Bound::Closed(c), false) => write!(f, "{c}]"),
        (Bound::Open(c), true) => write!(f, "({c}"),
        (Bound::Open(c), false) => write!(f, "{c})"),
        (Bound::HaloClosed(c), true) => write!(f, "[[{c}"),
        (Bound::HaloClosed(c), false) => write!(f, "{c}]]"),
        (Bound::HaloOpen(c), true) => write!(f, "(({c}"),
        (Bound::HaloOpen(c), false) => write!(f, "{c}))"),
    }
}

impl<T> std::ops::Not for GermPredicate<T> {
    type Output = Self;

    fn not(self) -> Self {
        GermPredicate::Not(Box::new(self))
    }
}

impl<T: Scalar> fmt::Display for GermPredicate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GermPredicate::Empty => write!(f, "empty"),
            GermPredicate::All => write!(f, "all"),
            GermPredicate::Limited => write!(f, "limited"),
            GermPredicate::Infinitesimal => write!(f, "inf"),
            GermPredicate::Standard => write!(f, "std"),
            GermPredicate::Interval(i) => {
                fmt_bound(&i.lo, true, f)?;
                write!(f, ", ")?;
                fmt_bound(&i.hi, false, f)
            }
            GermPredicate::Not(p) => write!(f, "~({p})"),
            GermPredicate::And(a, b) => write!(f, "({a} & {b})"),
            GermPredicate::Or(a, b) => write!(f, "({a} | {b})"),
        }
    }
}

/// The code of an external subset of a labelled standard universe.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CodedSet<T> {
    pub predicate: GermPredicate<T>,
    pub universe: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SetOp {
    Union,
    Intersection,
    Difference,
}

pub const DEFAULT_UNIVERSE: &str = "Q";

impl<T: Scalar> CodedSet<T> {
    pub fn new(predicate: GermPredicate<T>) -> Self {
        CodedSet { predicate, universe: DEFAULT_UNIVERSE.to_string() }
    }

    pub fn in_universe(predicate: GermPredicate<T>, universe: &str) -> Self {
        CodedSet { predicate, universe: universe.to_string() }
    }

    pub fn empty() -> Self {
        Self::new(GermPredicate::Empty)
    }

    pub fn membership(&self, a: &RatFn<T>) -> bool {
        self.predicate.holds(a)
    }

    pub fn setops(&self, other: &Self, op: SetOp) -> Result<Self, CodingError> {
        if self.universe != other.universe {
            return Err(CodingError::UniverseMismatch(self.universe.clone(), other.universe.clone()));
        }
        let (a, b) = (self.predicate.clone(), other.predicate.clone());
        let predicate = match op {
            SetOp::Union => a.or(b),
            SetOp::Intersection => a.and(b),
            SetOp::Difference => a.and(!b),
        };
        Ok(CodedSet { predicate, universe: self.universe.clone() })
    }

    /// Pointwise agreement on a catalog.
    pub fn equivalent_on(&self, other: &Self, catalog: &[RatFn<T>]) -> bool {
        self.universe == other.universe
            && catalog.iter().all(|g| self.membership(g) == other.membership(g))
    }

    pub fn subset_on(&self, other: &Self, catalog: &[RatFn<T>]) -> bool {
        catalog.iter().all(|g| !self.membership(g) || other.membership(g))
    }
}

/// An endpoint of a family member, as a standard sequence in `k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum KBound<T> {
    Unbounded,
    At { value: ExpSeq<T>, closed: bool },
}

/// A standard sequence of intervals `F(k)`, `k ≥ start`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CodedFamily<T> {
    pub lo: KBound<T>,
    pub hi: KBound<T>,
    pub start: u64,
    pub universe: String,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum CountableOp {
    Union,
    Intersection,
}

/// How many initial indices are compared exactly when checking monotonicity
/// of sequences with exponential terms.
pub const MONOTONE_SAMPLES: u64 = 256;

impl<T: Scalar> CodedFamily<T> {
    pub fn new(lo: KBound<T>, hi: KBound<T>, start: u64) -> Self {
        CodedFamily { lo, hi, start, universe: DEFAULT_UNIVERSE.to_string() }
    }

    /// The standard set `F(k)` as a predicate.
    pub fn member_at(&self, k: u64) -> Result<CodedSet<T>, CodingError> {
        let conv = |b: &KBound<T>| -> Result<Bound<T>, CodingError> {
            Ok(match b {
                KBound::Unbounded => Bound::Unbounded,
                KBound::At { value, closed } => {
                    let v = RatFn::constant(value.eval(k).ok_or(GermError::InvalidInstance(k))?);
                    if *closed {
                        Bound::Closed(v)
                    } else {
                        Bound::Open(v)
                    }
                }
            })
        };
        let i = GermInterval { lo: conv(&self.lo)?, hi: conv(&self.hi)? };
        Ok(CodedSet::in_universe(GermPredicate::Interval(i), &self.universe))
    }
}

/// Checks that `s(k+1) - s(k)` has the required sign (`Greater` means
/// non-decreasing) for every `k ≥ start`.
///
/// For purely rational sequences the difference is a germ in `k`, so sampling
/// up to its sign threshold settles every index. With exponential terms the
/// first [`MONOTONE_SAMPLES`] indices are checked exactly and the eventual sign
/// is read from the dominant term.
fn check_monotone<T: Scalar>(s: &ExpSeq<T>, start: u64, increasing: bool) -> Result<(), CodingError> {
    let ok = |d: &T| if increasing { !d.is_negative() } else { !d.is_positive() };
    let dir = if increasing { "non-decreasing" } else { "non-increasing" };
    let mut upto = start + MONOTONE_SAMPLES;
    let rational = s.as_ratfn();
    if let Some(r) = &rational {
        let next = r.compose(&(&RatFn::omega() + &RatFn::one()))?;
        let diff = &next - r;
        if !diff.is_zero() {
            let n0 = diff.eventually_threshold()?;
            let good = if increasing {
                diff.signum() == Ordering::Greater
            } else {
                diff.signum() == Ordering::Less
            };
            if !good {
                return Err(CodingError::NonMonotone(format!("{s} is not eventually {dir}")));
            }
            upto = upto.max(n0 + 1);
        }
    } else {
        // dominant base decides the eventual direction
        let lim = s.limit();
        let eventually_ok = match lim {
            ExtendedShadow::PosInf => increasing,
            ExtendedShadow::NegInf => !increasing,
            ExtendedShadow::Finite(_) => true,
        };
        if !eventually_ok {
            return Err(CodingError::NonMonotone(format!("{s} is not eventually {dir}")));
        }
    }
    let mut prev = s.eval(start).ok_or(GermError::InvalidInstance(start))?;
    for k in start + 1..=upto {
        let cur = s.eval(k).ok_or(GermError::InvalidInstance(k))?;
        if !ok(&(cur.clone() - prev)) {
            return Err(CodingError::NonMonotone(format!("{s} breaks {dir} at k = {k}")));
        }
        prev = cur;
    }
    Ok(())
}

/// Result of a countable operation: the limiting code plus the family it came from.
#[derive(Clone, Debug)]
pub struct CountableResult<T> {
    pub set: CodedSet<T>,
    pub op: CountableOp,
    pub family: CodedFamily<T>,
}

/// Largest index searched for witnesses.
pub const WITNESS_CAP: u64 = 1_000_000;

impl<T: Scalar> CountableResult<T> {
    pub fn membership(&self, a: &RatFn<T>) -> bool {
        self.set.membership(a)
    }

    /// A concrete standard index certifying the answer at `a`.
    ///
    /// For a union that contains `a`, the least `k` with `a ∈ F(k)`; for an
    /// intersection that omits `a`, the least `k` with `a ∉ F(k)`. `None`
    /// when the answer needs no witness.
    pub fn witness(&self, a: &RatFn<T>) -> Result<Option<u64>, CodingError> {
        let member = self.membership(a);
        let wanted = match (self.op, member) {
            (CountableOp::Union, true) => true,
            (CountableOp::Intersection, false) => false,
            _ => return Ok(None),
        };
        for k in self.family.start..=WITNESS_CAP {
            if self.family.member_at(k)?.membership(a) == wanted {
                return Ok(Some(k));
            }
        }
        Err(CodingError::NoWitness(WITNESS_CAP))
    }
}

fn not_positive_unlimited<T: Scalar>() -> GermPredicate<T> {
    GermPredicate::Limited.or(GermPredicate::Interval(GermInterval {
        lo: Bound::Unbounded,
        hi: Bound::Open(RatFn::zero()),
    }))
}

fn not_negative_unlimited<T: Scalar>() -> GermPredicate<T> {
    GermPredicate::Limited.or(GermPredicate::Interval(GermInterval {
        lo: Bound::Open(RatFn::zero()),
        hi: Bound::Unbounded,
    }))
}

/// Limiting code of a monotone family.
///
/// A union needs an increasing family (lower endpoints non-increasing, upper
/// endpoints non-decreasing); an intersection a decreasing one. An endpoint
/// that is eventually equal to its limit keeps its closedness. One that only
/// approaches its limit `c` gives a halo bound: a union reaches every germ
/// whose shadow lies strictly past `c`, an intersection keeps the whole
/// monad of `c`. Endpoints that run off to infinity exclude (union) or
/// select (intersection) the unlimited germs on that side.
pub fn countable_ops<T: Scalar>(
    family: &CodedFamily<T>,
    op: CountableOp,
) -> Result<CountableResult<T>, CodingError> {
    let union = op == CountableOp::Union;
    let mut parts = Vec::new();
    let mut interval = GermInterval { lo: Bound::Unbounded, hi: Bound::Unbounded };

    for (side, lower) in [(&family.lo, true), (&family.hi, false)] {
        let KBound::At { value, closed } = side else { continue };
        // union: lower must fall, upper rise; intersection the reverse
        let increasing = lower != union;
        check_monotone(value, family.start, increasing)?;
        let limit = value.limit();
        let bound = match limit {
            ExtendedShadow::Finite(c) => {
                let c = RatFn::constant(c);
                let constant = (value - &ExpSeq::constant(c.as_constant().expect("standard"))).is_zero();
                match (constant, *closed, union) {
                    (true, true, _) => Bound::Closed(c),
                    (true, false, _) => Bound::Open(c),
                    (false, _, true) => Bound::HaloOpen(c),
                    (false, _, false) => Bound::HaloClosed(c),
                }
            }
            ExtendedShadow::NegInf | ExtendedShadow::PosInf => {
                let pos = limit == ExtendedShadow::PosInf;
                let pred = match (union, pos) {
                    (true, true) => not_positive_unlimited(),
                    (true, false) => not_negative_unlimited(),
                    (false, true) => !not_positive_unlimited(),
                    (false, false) => !not_negative_unlimited(),
                };
                parts.push(pred);
                Bound::Unbounded
            }
        };
        if lower {
            interval.lo = bound;
        } else {
            interval.hi = bound;
        }
    }
    let predicate = parts
        .into_iter()
        .fold(GermPredicate::Interval(interval), |acc, p| acc.and(p));
    Ok(CountableResult {
        set: CodedSet::in_universe(predicate, &family.universe),
        op,
        family: family.clone(),
    })
}

/// Germs covering every classification tag, with both signs and a spread of
/// shadows, for pointwise checks of predicate identities.
pub fn catalog<T: Scalar>() -> Vec<RatFn<T>> {
    let w = RatFn::<T>::omega();
    let c = |n: i64, d: i64| RatFn::<T>::constant(T::from_frac(n, d));
    let inv = |g: &RatFn<T>| g.recip().expect("nonzero");
    let winv = inv(&w);
    let mut out = vec![RatFn::zero()];
    let shadows = [(1, 1), (1, 2), (1, 3), (1, 4), (2, 3), (3, 4), (2, 1), (7, 3), (5, 1)];
    for &(n, d) in &shadows {
        for sign in [1, -1] {
            let s = c(sign * n, d);
            out.push(s.clone());
            out.push(&s + &winv);
            out.push(&s - &winv);
            out.push(&s + &(&winv * &winv));
        }
    }
    for g in [
        winv.clone(),
        -&winv,
        &winv * &winv,
        -&(&winv * &winv),
        &c(3, 1) * &winv,
        w.clone(),
        -&w,
        &w * &w,
        &w + &c(1, 2),
        -&(&w * &w),
        w.powi(3).expect("power"),
        (&w + &c(1, 1)).checked_div(&(&w - &c(1, 1))).expect("nonzero"),
    ] {
        out.push(g);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::germfield::GermClass;
    use num_rational::BigRational;

    type G = RatFn<BigRational>;
    type P = GermPredicate<BigRational>;
    type S = ExpSeq<BigRational>;

    fn c(n: i64, d: i64) -> G {
        G::constant(BigRational::from_frac(n, d))
    }
    fn w() -> G {
        G::omega()
    }
    fn winv() -> G {
        w().recip().unwrap()
    }

    #[test]
    fn catalog_spans_every_class() {
        let cat = catalog::<BigRational>();
        for tag in GermClass::ALL {
            assert!(cat.iter().any(|g| g.classify() == tag), "missing {tag}");
        }
    }

    #[test]
    fn membership_examples() {
        assert!(CodedSet::new(P::Limited).membership(&(&c(3, 1) + &winv())));
        assert!(!CodedSet::new(P::Infinitesimal).membership(&w()));
        let s = CodedSet::new(P::Interval(GermInterval::closed(winv(), c(1, 2))));
        let a = &c(1, 4) + &(&winv() * &winv());
        // two exact comparisons
        assert_eq!(a.compare(&winv()), Ordering::Greater);
        assert_eq!(a.compare(&c(1, 2)), Ordering::Less);
        assert!(s.membership(&a));
    }

    #[test]
    fn limited_minus_infinitesimal_is_appreciable() {
        let cat = catalog::<BigRational>();
        let d = CodedSet::new(P::Limited)
            .setops(&CodedSet::new(P::Infinitesimal), SetOp::Difference)
            .unwrap();
        for g in &cat {
            let expect = matches!(
                g.classify(),
                GermClass::AppreciableNonstandard | GermClass::StandardNonzero
            );
            assert_eq!(d.membership(g), expect, "{g}");
        }
    }

    #[test]
    fn union_with_empty_is_identity() {
        let s = CodedSet::new(P::Interval(GermInterval::closed(c(0, 1), c(1, 1))));
        let u = s.setops(&CodedSet::empty(), SetOp::Union).unwrap();
        assert!(u.equivalent_on(&s, &catalog()));
    }

    #[test]
    fn only_standard_infinitesimal_is_zero() {
        let s = CodedSet::new(P::Standard)
            .setops(&CodedSet::new(P::Infinitesimal), SetOp::Intersection)
            .unwrap();
        let members: Vec<G> = catalog().into_iter().filter(|g| s.membership(g)).collect();
        assert_eq!(members, vec![G::zero()]);
    }

    #[test]
    fn universe_mismatch() {
        let a = CodedSet::<BigRational>::in_universe(P::All, "Q");
        let b = CodedSet::in_universe(P::All, "N");
        assert!(matches!(a.setops(&b, SetOp::Union), Err(CodingError::UniverseMismatch(..))));
    }

    fn recip_k() -> S {
        S::constant(BigRational::from_i64(1)).checked_div(&S::k()).unwrap()
    }

    fn at(v: S, closed: bool) -> KBound<BigRational> {
        KBound::At { value: v, closed }
    }

    #[test]
    fn union_of_shrinking_gaps() {
        // ⋃ [1/k, 1]
        let fam = CodedFamily::new(at(recip_k(), true), at(S::constant(BigRational::from_i64(1)), true), 1);
        let r = countable_ops(&fam, CountableOp::Union).unwrap();
        assert!(r.membership(&c(1, 2)));
        assert!(r.membership(&c(1, 1)));
        assert!(!r.membership(&c(0, 1)));
        assert!(!r.membership(&winv()), "1/w is below every 1/k");
        assert!(!r.membership(&(&c(1, 1) + &winv())));
        assert!(r.membership(&(&c(1, 1) - &winv())));
        assert_eq!(r.witness(&c(1, 3)).unwrap(), Some(3));
        assert_eq!(r.witness(&winv()).unwrap(), None);
    }

    #[test]
    fn constant_intersection() {
        let one = S::constant(BigRational::from_i64(1));
        let fam = CodedFamily::new(at(S::zero(), true), at(one, true), 1);
        let r = countable_ops(&fam, CountableOp::Intersection).unwrap();
        let plain = CodedSet::new(P::Interval(GermInterval::closed(c(0, 1), c(1, 1))));
        assert!(r.set.equivalent_on(&plain, &catalog()));
    }

    #[test]
    fn intersection_down_to_the_monad() {
        // ⋂ [0, 1/k]: zero and the positive infinitesimals
        let fam = CodedFamily::new(at(S::zero(), true), at(recip_k(), true), 1);
        let r = countable_ops(&fam, CountableOp::Intersection).unwrap();
        let sq = &winv() * &winv();
        // valuation oracle: 1/w^2 has valuation -2 < 0 = valuation of any 1/k
        assert!(sq.valuation() < c(1, 1000).valuation());
        assert!(r.membership(&sq));
        assert!(r.membership(&G::zero()));
        assert!(!r.membership(&-&sq));
        assert!(!r.membership(&c(1, 1000)));
        assert_eq!(r.witness(&c(1, 1000)).unwrap(), Some(1001));
    }

    #[test]
    fn unbounded_endpoints_touch_only_limited_germs() {
        // ⋃ [-k, k] is the galaxy of 0
        let fam = CodedFamily::new(at(-&S::k(), true), at(S::k(), true), 1);
        let r = countable_ops(&fam, CountableOp::Union).unwrap();
        for g in catalog::<BigRational>() {
            assert_eq!(r.membership(&g), g.is_limited(), "{g}");
        }
        // ⋂ [k, +inf) is the positive unlimited germs
        let fam = CodedFamily::new(at(S::k(), true), KBound::Unbounded, 1);
        let r = countable_ops(&fam, CountableOp::Intersection).unwrap();
        for g in catalog::<BigRational>() {
            assert_eq!(r.membership(&g), g.classify() == GermClass::UnlimitedPositive, "{g}");
        }
    }

    #[test]
    fn rejects_wrong_direction() {
        // an upper endpoint that falls cannot feed a union
        let fam = CodedFamily::new(KBound::Unbounded, at(recip_k(), true), 1);
        assert!(matches!(
            countable_ops(&fam, CountableOp::Union),
            Err(CodingError::NonMonotone(_))
        ));
        // oscillation in the first few terms: (k - 3)^2
        let bumpy = &(&S::k() - &S::constant(BigRational::from_i64(3))) * &(&S::k() - &S::constant(BigRational::from_i64(3)));
        let fam = CodedFamily::new(KBound::Unbounded, at(bumpy, true), 0);
        assert!(matches!(
            countable_ops(&fam, CountableOp::Union),
            Err(CodingError::NonMonotone(_))
        ));
    }
}
