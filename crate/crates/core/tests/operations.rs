//! End-to-end checks of the documented operation examples, written through
//! the text syntax with independent numeric oracles where one exists.

use std::cmp::Ordering;

use hyperq::coding::{CodedFamily, CodedSet, CountableOp, GermPredicate, KBound, SetOp};
use hyperq::exprlang::{self, Mode};
use hyperq::extnum::{extnum_add, extnum_mul, extnum_order, ExtOrder, Neutrix};
use hyperq::germfield::{GermClass, Valuation};
use hyperq::hull::{self, StdMetricStructure as S};
use hyperq::loeb::{self, InternalSet, Piece};
use hyperq::{ExternalNumber, Germ, Q};
use num_traits::{One, Zero};

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

fn g(s: &str) -> Germ {
    exprlang::to_germ(&exprlang::parse(s, Mode::Germ).unwrap()).unwrap()
}

fn x(s: &str) -> ExternalNumber {
    exprlang::to_ext(&exprlang::parse(s, Mode::Ext).unwrap()).unwrap()
}

fn set(s: &str) -> GermPredicate<Q> {
    exprlang::to_predicate(&exprlang::parse(s, Mode::Set).unwrap()).unwrap()
}

/// Value of a germ at a concrete index.
fn at(a: &Germ, n: i64) -> Q {
    a.eval(&Q::from_integer(n.into())).unwrap()
}

#[test]
fn arithmetic_matches_pointwise_evaluation() {
    assert_eq!(g("w * (1/w)"), g("1"));
    assert_eq!(g("(w + 1) - w"), g("1"));
    let sum = g("(w^2 - 1)/(w + 1) + 1");
    assert_eq!(sum, g("w"));
    // agreement with the unreduced expression at five indices
    for n in [2, 3, 5, 8, 13] {
        let raw = (q(n * n - 1, 1) / q(n + 1, 1)) + Q::one();
        assert_eq!(at(&sum, n), raw);
    }
}

#[test]
fn comparison_is_eventual_sign() {
    assert_eq!(g("w").compare(&g("1000000")), Ordering::Greater);
    assert_eq!(g("1/w").compare(&Germ::zero()), Ordering::Greater);
    let (a, b) = (g("(2*w + 3)/(w + 1)"), g("2"));
    assert_eq!(a.compare(&b), Ordering::Greater);
    for n in [10, 100, 1000] {
        assert!(at(&a, n) > at(&b, n));
    }
}

#[test]
fn valuation_shadow_and_class() {
    assert_eq!(g("w").valuation(), Valuation::Order(1));
    assert_eq!(g("3 + 1/w").valuation(), Valuation::Order(0));
    assert_eq!(g("(w + 2)/(w^3 - w)").valuation(), Valuation::Order(-2));
    assert_eq!(g("0").valuation(), Valuation::Bottom);

    assert_eq!(g("1/w").standard_part(), Some(Q::zero()));
    assert_eq!(g("w").standard_part(), None);
    let a = g("(2*w^2 + 3)/(w^2 - w)");
    assert_eq!(a.standard_part(), Some(q(2, 1)));
    let two = q(2, 1);
    let gap = |n: i64| {
        let d = at(&a, n) - &two;
        if d < Q::zero() {
            -d
        } else {
            d
        }
    };
    assert!(gap(1000) < q(1, 100) && gap(1_000_000) < q(1, 100_000));

    assert_eq!(g("7/3").classify(), GermClass::StandardNonzero);
    assert_eq!(g("1/w^2").classify(), GermClass::InfinitesimalNonzero);
    assert_eq!(g("2 + 5/w").classify(), GermClass::AppreciableNonstandard);
}

#[test]
fn thresholds_hold_pointwise() {
    for (text, least) in [("w - 5", 6), ("(w - 100)*(w - 2)", 101), ("1/w", 1)] {
        let a = g(text);
        let n0 = a.eventually_threshold().unwrap();
        assert!(n0 >= least, "{text}: {n0}");
        for n in n0..n0 + 500 {
            assert_eq!(at(&a, n as i64).cmp(&Q::zero()), a.signum(), "{text} at {n}");
        }
    }
}

#[test]
fn diagonals() {
    let f = |s: &str| exprlang::to_bivariate(&exprlang::parse(s, Mode::Family).unwrap()).unwrap();
    assert_eq!(f("k/(k + 1)").diagonal().unwrap(), g("w/(w + 1)"));
    let d = f("k/(k + 1) + 1/w").diagonal().unwrap();
    assert_eq!(d, g("w/(w + 1) + 1/w"));
    assert_eq!(d.standard_part(), Some(Q::one()));
    assert_eq!(f("1/(k*w)").diagonal().unwrap(), g("1/w^2"));
}

#[test]
fn coded_sets() {
    let c = |p: GermPredicate<Q>| CodedSet::new(p);
    assert!(c(set("limited")).membership(&g("3 + 1/w")));
    assert!(!c(set("inf")).membership(&g("w")));
    assert!(c(set("[1/w, 1/2]")).membership(&g("1/4 + 1/w^2")));

    let appreciable = c(set("limited")).setops(&c(set("inf")), SetOp::Difference).unwrap();
    for a in hyperq::coding::catalog::<Q>() {
        let class = a.classify();
        let expect = matches!(class, GermClass::StandardNonzero | GermClass::AppreciableNonstandard);
        assert_eq!(appreciable.membership(&a), expect, "{a}");
    }
    let std_inf = c(set("std")).setops(&c(set("inf")), SetOp::Intersection).unwrap();
    for a in hyperq::coding::catalog::<Q>() {
        assert_eq!(std_inf.membership(&a), a.is_zero(), "{a}");
    }
}

#[test]
fn countable_families() {
    let k = |s: &str| exprlang::to_kseq(&exprlang::parse(s, Mode::Family).unwrap()).unwrap();
    let closed = |s: &str| KBound::At { value: k(s), closed: true };
    let grow = CodedFamily::new(closed("1/k"), closed("1"), 1);
    let u = hyperq::coding::countable_ops(&grow, CountableOp::Union).unwrap();
    // 1/w lies below every standard 1/k, so only appreciable points join
    assert!(!u.set.membership(&g("1/w")));
    assert!(u.set.membership(&g("1/1000")));
    assert!(u.set.membership(&g("1")));
    assert!(!u.set.membership(&g("0")));
    let shrink = CodedFamily::new(closed("0"), closed("1/k"), 1);
    let i = hyperq::coding::countable_ops(&shrink, CountableOp::Intersection).unwrap();
    assert!(i.set.membership(&g("1/w^2")));
    assert!(i.set.membership(&g("0")));
    assert!(!i.set.membership(&g("1/1000")));
}

#[test]
fn hull_examples() {
    let p = |s: S, t: &str| hull::hull_point(s, &[g(t)]);
    assert_eq!(p(S::RationalsAbs, "1 - 1/w").unwrap().canonical, vec![g("1")]);
    assert!(p(S::RationalsAbs, "w").is_err());
    assert_eq!(p(S::NaturalsDiscrete, "w").unwrap().canonical, vec![g("w")]);
    let d = |s: S, a: &str, b: &str| hull::hull_dist(&p(s, a).unwrap(), &p(s, b).unwrap()).unwrap();
    assert_eq!(d(S::RationalsAbs, "1 + 1/w", "1"), Q::zero());
    assert_eq!(d(S::RationalsAbs, "2 - 1/w", "1/2"), q(3, 2));
    assert_eq!(d(S::NaturalsDiscrete, "w", "w + 1"), Q::one());
    assert!(hull::approachable(S::RationalsAbs, &[g("1/2 + 1/w")]));
    assert!(!hull::approachable(S::NaturalsDiscrete, &[g("w")]));
    assert!(hull::approachable(S::NaturalsDiscrete, &[g("5")]));
    assert_eq!(hull::normed_hull(2, &[g("1 + 1/w"), g("1/w")]).unwrap().canonical, vec![g("1"), g("0")]);
    assert!(hull::normed_hull(2, &[g("w"), g("0")]).is_err());
    let v = hull::normed_hull(3, &[g("(2*w + 1)/w"), g("1/2"), g("3/w^2")]).unwrap();
    assert_eq!(v.canonical, vec![g("2"), g("1/2"), g("0")]);
}

#[test]
fn counting_bounds_straddle_grid_counts() {
    let closed = |a: &str, b: &str| InternalSet::on_default(vec![Piece::closed(g(a), g(b))]);
    let (lo, hi) = loeb::counting_measure(&closed("1/4", "3/4"));
    assert_eq!(lo.standard_part(), Some(q(1, 2)));
    assert_eq!(hi.standard_part(), Some(q(1, 2)));
    // grid {i/N} with N = 10^4 points in [1/4, 3/4]
    let n = 10_000i64;
    let count = (3 * n / 4) - ((n + 3) / 4) + 1;
    let exact = q(count, n + 1);
    assert!(at(&lo, n) <= exact && exact <= at(&hi, n));

    assert_eq!(loeb::loeb_measure(&closed("0", "1")), Q::one());
    assert_eq!(loeb::loeb_measure(&closed("1/w", "2/w")), Q::zero());
    assert_eq!(loeb::loeb_measure(&closed("1/w", "1/2")), q(1, 2));
    assert_eq!(loeb::loeb_measure(&closed("0", "1/3").union(&closed("2/3", "1"))), q(2, 3));
    assert_eq!(loeb::loeb_measure(&closed("1/2 - 1/w", "1/2 + 1/w")), Q::zero());

    let r = loeb::finite_additivity_check(&closed("0", "1/w"), &closed("1/3", "2/3")).unwrap();
    assert_eq!((r.first, r.second, r.union), (Q::zero(), q(1, 3), q(1, 3)));
}

#[test]
fn lebesgue_examples() {
    assert_eq!(loeb::lebesgue(&set("(1/4, 3/4)")).unwrap(), q(1, 2));
    assert_eq!(loeb::lebesgue(&set("{1/3}")).unwrap(), Q::zero());
    assert_eq!(loeb::lebesgue(&set("[0, 1/3] | (1/2, 1]")).unwrap(), q(5, 6));
    assert!(loeb::lebesgue(&set("[0, 1/w]")).is_err());
}

#[test]
fn external_number_examples() {
    assert_eq!(Neutrix::M0 + Neutrix::M0, Neutrix::M0);
    assert_eq!(Neutrix::M0.scale(&g("w")), Neutrix::G0);
    assert_eq!(Neutrix::M0 * Neutrix::G0, Neutrix::M0);
    assert_eq!(extnum_add(&x("3 + M0"), &x("4 + M0")), x("7 + M0"));
    assert_eq!(x("3 + 1/w + M0").to_string(), "3 + M0");
    assert_eq!(extnum_add(&x("w + G0"), &x("-w + M0")), x("G0"));
    assert_eq!(extnum_mul(&x("3 + M0"), &x("2 + M0")), x("6 + M0"));
    assert_eq!(extnum_mul(&x("M0"), &x("M0")).neutrix(), Neutrix::Graded(-2));
    let y = x("w^2 + 1/w + N(-1)");
    assert_eq!(extnum_mul(&x("1"), &y), y);
    assert_eq!(extnum_order(&x("3 + M0"), &x("4 + M0")), ExtOrder::Less);
    assert_eq!(extnum_order(&x("3 + M0"), &x("3 + G0")), ExtOrder::Overlapping);
    assert_eq!(extnum_order(&x("1/w + N(-2)"), &x("2/w + N(-2)")), ExtOrder::Less);
}
