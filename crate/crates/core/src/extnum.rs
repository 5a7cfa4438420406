//! Neutrices and external numbers over the germ field.
//!
//! The convex additive subgroups available in the fragment are `{0}`, the
//! whole field, and the valuation-graded groups `{x : v(x) ≤ k}`. An
//! external number is a germ plus such a group, kept in a normal form where
//! the center carries no monomial the neutrix would absorb.

use std::cmp::Ordering;
use std::fmt;

use crate::germfield::{Poly, RatFn, Valuation};
use crate::scalar::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Neutrix {
    Zero,
    /// `{x : valuation(x) ≤ k}`.
    Graded(i64),
    All,
}

impl Neutrix {
    /// The monad of zero: the infinitesimals.
    pub const M0: Neutrix = Neutrix::Graded(-1);
    /// The galaxy of zero: the limited germs.
    pub const G0: Neutrix = Neutrix::Graded(0);

    /// The set `a·N`.
    pub fn scale<T: Scalar>(self, a: &RatFn<T>) -> Neutrix {
        match (self, a.valuation()) {
            (_, Valuation::Bottom) | (Neutrix::Zero, _) => Neutrix::Zero,
            (Neutrix::All, _) => Neutrix::All,
            (Neutrix::Graded(k), Valuation::Order(v)) => Neutrix::Graded(k.saturating_add(v)),
        }
    }

    pub fn contains<T: Scalar>(self, x: &RatFn<T>) -> bool {
        match (self, x.valuation()) {
            (_, Valuation::Bottom) | (Neutrix::All, _) => true,
            (Neutrix::Zero, _) => false,
            (Neutrix::Graded(k), Valuation::Order(v)) => v <= k,
        }
    }

    fn grade(self) -> Option<i64> {
        match self {
            Neutrix::Graded(k) => Some(k),
            _ => None,
        }
    }
}

impl std::ops::Add for Neutrix {
    type Output = Neutrix;

    /// The Minkowski sum, which is the larger of the two.
    fn add(self, other: Neutrix) -> Neutrix {
        use Neutrix::*;
        match (self, other) {
            (All, _) | (_, All) => All,
            (Zero, n) | (n, Zero) => n,
            (Graded(a), Graded(b)) => Graded(a.max(b)),
        }
    }
}

impl std::ops::Mul for Neutrix {
    type Output = Neutrix;

    fn mul(self, other: Neutrix) -> Neutrix {
        use Neutrix::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (All, _) | (_, All) => All,
            (Graded(a), Graded(b)) => Graded(a.saturating_add(b)),
        }
    }
}

impl fmt::Display for Neutrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Neutrix::Zero => write!(f, "0"),
            Neutrix::All => write!(f, "all"),
            Neutrix::M0 => write!(f, "M0"),
            Neutrix::G0 => write!(f, "G0"),
            Neutrix::Graded(k) => write!(f, "N({k})"),
        }
    }
}

/// `center + neutrix`, always canonical.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExternalNumber<T> {
    center: RatFn<T>,
    neutrix: Neutrix,
}

/// Part of the expansion of `g` at infinity with exponents `≥ m`.
fn truncate_below<T: Scalar>(g: &RatFn<T>, m: i64) -> RatFn<T> {
    let (p, q) = (g.numer(), g.denom());
    if m >= 0 {
        // polynomial part of p / (q·w^m), shifted back up
        let (quot, _) = p.div_rem(&q.shift(m as usize));
        RatFn::from_poly(quot.shift(m as usize))
    } else {
        let s = m.unsigned_abs() as usize;
        let (quot, _) = p.shift(s).div_rem(q);
        RatFn::from_parts(quot, Poly::monomial(T::one(), s)).expect("nonzero denominator")
    }
}

impl<T: Scalar> ExternalNumber<T> {
    pub fn new(center: RatFn<T>, neutrix: Neutrix) -> Self {
        let center = match neutrix {
            Neutrix::Zero => center,
            Neutrix::All => RatFn::zero(),
            Neutrix::Graded(k) => truncate_below(&center, k.saturating_add(1)),
        };
        ExternalNumber { center, neutrix }
    }

    pub fn exact(center: RatFn<T>) -> Self {
        Self::new(center, Neutrix::Zero)
    }

    pub fn center(&self) -> &RatFn<T> {
        &self.center
    }

    pub fn neutrix(&self) -> Neutrix {
        self.neutrix
    }

    pub fn canonical(&self) -> Self {
        Self::new(self.center.clone(), self.neutrix)
    }

    /// Whether the germ is one of the representatives.
    pub fn contains(&self, g: &RatFn<T>) -> bool {
        self.neutrix.contains(&(g - &self.center))
    }
}

pub fn extnum_add<T: Scalar>(x: &ExternalNumber<T>, y: &ExternalNumber<T>) -> ExternalNumber<T> {
    ExternalNumber::new(&x.center + &y.center, x.neutrix + y.neutrix)
}

pub fn extnum_neg<T: Scalar>(x: &ExternalNumber<T>) -> ExternalNumber<T> {
    ExternalNumber { center: -&x.center, neutrix: x.neutrix }
}

pub fn extnum_mul<T: Scalar>(x: &ExternalNumber<T>, y: &ExternalNumber<T>) -> ExternalNumber<T> {
    let n = y.neutrix.scale(&x.center) + x.neutrix.scale(&y.center) + x.neutrix * y.neutrix;
    ExternalNumber::new(&x.center * &y.center, n)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ExtOrder {
    Less,
    Greater,
    Overlapping,
}

impl fmt::Display for ExtOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtOrder::Less => "less",
            ExtOrder::Greater => "greater",
            ExtOrder::Overlapping => "overlapping",
        })
    }
}

/// `Less` when every representative of `x` lies below every representative
/// of `y`: the gap between the centers must outgrow both neutrices.
pub fn extnum_order<T: Scalar>(x: &ExternalNumber<T>, y: &ExternalNumber<T>) -> ExtOrder {
    if x.neutrix == Neutrix::All || y.neutrix == Neutrix::All {
        return ExtOrder::Overlapping;
    }
    let d = &y.center - &x.center;
    let Valuation::Order(v) = d.valuation() else { return ExtOrder::Overlapping };
    let clear = match x.neutrix.grade().into_iter().chain(y.neutrix.grade()).max() {
        None => true,
        Some(k) => v > k,
    };
    match (clear, d.signum()) {
        (true, Ordering::Greater) => ExtOrder::Less,
        (true, Ordering::Less) => ExtOrder::Greater,
        _ => ExtOrder::Overlapping,
    }
}

impl<T: Scalar> fmt::Display for ExternalNumber<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.neutrix {
            Neutrix::Zero => write!(f, "{}", self.center),
            n => write!(f, "{} + {n}", self.center),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type G = RatFn<BigRational>;
    type E = ExternalNumber<BigRational>;

    fn c(n: i64, d: i64) -> G {
        G::constant(BigRational::from_frac(n, d))
    }
    fn w() -> G {
        G::omega()
    }
    fn winv() -> G {
        w().recip().unwrap()
    }

    /// Germs of every valuation in `lo..=hi` with varied lower-order terms.
    fn samples(lo: i64, hi: i64) -> Vec<G> {
        let mut out = Vec::new();
        for v in lo..=hi {
            for (n, d) in [(1, 1), (-3, 2), (5, 7)] {
                let lead = G::omega_pow(v).scale(&BigRational::from_frac(n, d));
                out.push(&lead + &G::omega_pow(v - 1));
            }
        }
        out
    }

    #[test]
    fn neutrix_ops() {
        assert_eq!(Neutrix::M0 + Neutrix::M0, Neutrix::M0);
        assert_eq!(Neutrix::M0.scale(&w()), Neutrix::G0);
        assert_eq!(Neutrix::M0 * Neutrix::G0, Neutrix::M0);
        assert_eq!(Neutrix::G0.scale(&G::zero()), Neutrix::Zero);
        assert_eq!(Neutrix::All * Neutrix::Zero, Neutrix::Zero);
        // Minkowski check of w·M0 = G0 on infinitesimal samples
        let inf = samples(-21, -1);
        assert!(inf.iter().all(|g| Neutrix::M0.contains(g)));
        assert!(inf.iter().map(|g| g * &w()).all(|g| Neutrix::G0.contains(&g)));
        // 1/2 = w · (1/(2w)) is reached
        let half = &w() * &winv().scale(&BigRational::from_frac(1, 2));
        assert_eq!(half, c(1, 2));
    }

    #[test]
    fn graded_neutrices_are_closed() {
        let limited_scalars: Vec<G> = samples(-3, 0);
        for k in -3..=2 {
            let n = Neutrix::Graded(k);
            let members = samples(k - 3, k);
            for a in &members {
                assert!(n.contains(a));
                for b in &members {
                    assert!(n.contains(&(a + b)));
                }
                for s in &limited_scalars {
                    assert!(n.contains(&(a * s)));
                }
            }
            assert!(!n.contains(&G::omega_pow(k + 1)));
        }
    }

    #[test]
    fn canonical_truncation() {
        let x = E::new(&c(3, 1) + &winv(), Neutrix::M0);
        assert_eq!(x.center(), &c(3, 1));
        assert_eq!(x.canonical(), x);
        // (w^2 + 1)/(w - 1) = w + 1 + 2/w + 2/w^2 + ...
        let g = (&w().powi(2).unwrap() + &c(1, 1)).checked_div(&(&w() - &c(1, 1))).unwrap();
        assert_eq!(E::new(g.clone(), Neutrix::G0).center(), &w());
        assert_eq!(E::new(g.clone(), Neutrix::M0).center(), &(&w() + &c(1, 1)));
        let two_terms = &(&w() + &c(1, 1)) + &winv().scale(&BigRational::from_i64(2));
        assert_eq!(E::new(g.clone(), Neutrix::Graded(-2)).center(), &two_terms);
        assert_eq!(E::new(g.clone(), Neutrix::All).center(), &G::zero());
        assert_eq!(E::new(g, Neutrix::Graded(1)).center(), &G::zero());
    }

    #[test]
    fn addition_examples() {
        let m = |x: G| E::new(x, Neutrix::M0);
        assert_eq!(extnum_add(&m(c(3, 1)), &m(c(4, 1))), m(c(7, 1)));
        assert_eq!(extnum_add(&m(&c(3, 1) + &winv()), &m(G::zero())), m(c(3, 1)));
        let s = extnum_add(&E::new(w(), Neutrix::G0), &E::new(-&w(), Neutrix::M0));
        assert_eq!(s, E::new(G::zero(), Neutrix::G0));
        assert_eq!(s.to_string(), "0 + G0");
    }

    #[test]
    fn multiplication_examples() {
        let m = |x: G| E::new(x, Neutrix::M0);
        let p = extnum_mul(&m(c(3, 1)), &m(c(2, 1)));
        assert_eq!(p, m(c(6, 1)));
        // sampled representatives land inside
        for a in samples(-4, -1) {
            for b in samples(-4, -1) {
                assert!(p.contains(&(&(&c(3, 1) + &a) * &(&c(2, 1) + &b))));
            }
        }
        let sq = extnum_mul(&m(G::zero()), &m(G::zero()));
        assert_eq!(sq, E::new(G::zero(), Neutrix::Graded(-2)));
        assert_eq!(sq.to_string(), "0 + N(-2)");
        let x = E::new(&w() + &c(1, 2), Neutrix::M0);
        assert_eq!(extnum_mul(&E::exact(c(1, 1)), &x), x);
    }

    #[test]
    fn order_examples() {
        let m = |x: G| E::new(x, Neutrix::M0);
        assert_eq!(extnum_order(&m(c(3, 1)), &m(c(4, 1))), ExtOrder::Less);
        assert_eq!(extnum_order(&m(c(3, 1)), &E::new(c(3, 1), Neutrix::G0)), ExtOrder::Overlapping);
        let a = E::new(winv(), Neutrix::Graded(-2));
        let b = E::new(winv().scale(&BigRational::from_i64(2)), Neutrix::Graded(-2));
        assert_eq!(extnum_order(&a, &b), ExtOrder::Less);
        assert_eq!(extnum_order(&b, &a), ExtOrder::Greater);
        assert_eq!(extnum_order(&E::exact(c(1, 1)), &E::exact(c(1, 1))), ExtOrder::Overlapping);
    }
}
