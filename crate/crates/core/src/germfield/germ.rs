//! Reduced rational functions of the index, ordered by eventual dominance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::poly::Poly;
use super::GermError;
use crate::scalar::Scalar;

/// A definable hyperrational: the germ at infinity of `n ↦ p(n)/q(n)`.
///
/// Stored in lowest terms with a monic denominator, so two germs are equal
/// exactly when their fields are. Ordering is eventual dominance.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFn<T> {
    num: Poly<T>,
    den: Poly<T>,
}

/// Growth order: `deg(num) - deg(den)`, with `Bottom` standing in for the zero germ.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Valuation {
    Bottom,
    Order(i64),
}

impl Valuation {
    pub fn order(self) -> Option<i64> {
        match self {
            Valuation::Bottom => None,
            Valuation::Order(k) => Some(k),
        }
    }
}

impl Add for Valuation {
    type Output = Valuation;
    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Order(a), Valuation::Order(b)) => Valuation::Order(a + b),
            _ => Valuation::Bottom,
        }
    }
}

/// The standard part of a germ, with signed infinities for unlimited germs.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ExtendedShadow<T> {
    Finite(T),
    PosInf,
    NegInf,
}

impl<T: Scalar> ExtendedShadow<T> {
    pub fn finite(&self) -> Option<&T> {
        match self {
            ExtendedShadow::Finite(v) => Some(v),
            _ => None,
        }
    }
}

impl<T: Scalar> fmt::Display for ExtendedShadow<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedShadow::Finite(v) => write!(f, "{v}"),
            ExtendedShadow::PosInf => write!(f, "+inf"),
            ExtendedShadow::NegInf => write!(f, "-inf"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum GermClass {
    Zero,
    StandardNonzero,
    InfinitesimalNonzero,
    AppreciableNonstandard,
    UnlimitedPositive,
    UnlimitedNegative,
}

impl GermClass {
    pub const ALL: [GermClass; 6] = [
        GermClass::Zero,
        GermClass::StandardNonzero,
        GermClass::InfinitesimalNonzero,
        GermClass::AppreciableNonstandard,
        GermClass::UnlimitedPositive,
        GermClass::UnlimitedNegative,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GermClass::Zero => "zero",
            GermClass::StandardNonzero => "standard-nonzero",
            GermClass::InfinitesimalNonzero => "infinitesimal-nonzero",
            GermClass::AppreciableNonstandard => "appreciable-nonstandard",
            GermClass::UnlimitedPositive => "unlimited-positive",
            GermClass::UnlimitedNegative => "unlimited-negative",
        }
    }

    pub fn is_limited(self) -> bool {
        !matches!(self, GermClass::UnlimitedPositive | GermClass::UnlimitedNegative)
    }

    pub fn is_infinitesimal(self) -> bool {
        matches!(self, GermClass::Zero | GermClass::InfinitesimalNonzero)
    }

    pub fn is_standard(self) -> bool {
        matches!(self, GermClass::Zero | GermClass::StandardNonzero)
    }
}

impl fmt::Display for GermClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl<T: Scalar> RatFn<T> {
    /// Builds `num/den` in canonical form.
    pub fn from_parts(num: Poly<T>, den: Poly<T>) -> Result<Self, GermError> {
        if den.is_zero() {
            return Err(GermError::DivisionByZero);
        }
        Ok(Self::reduce(num, den))
    }

    fn reduce(num: Poly<T>, den: Poly<T>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(&den);
        let (num, _) = num.div_rem(&g);
        let (den, _) = den.div_rem(&g);
        let lc = den.leading();
        RatFn {
            num: num.scale(&(T::one() / lc.clone())),
            den: den.monic(),
        }
    }

    pub fn from_poly(p: Poly<T>) -> Self {
        RatFn { num: p, den: Poly::one() }
    }

    pub fn constant(c: T) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn from_i64(n: i64) -> Self {
        Self::constant(T::from_i64(n))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    /// The distinguished unlimited germ ω, the index itself.
    pub fn omega() -> Self {
        Self::from_poly(Poly::x())
    }

    /// `ω^e` for any integer exponent.
    pub fn omega_pow(e: i64) -> Self {
        let mono = Poly::monomial(T::one(), e.unsigned_abs() as usize);
        if e >= 0 {
            Self::from_poly(mono)
        } else {
            RatFn { num: Poly::one(), den: mono }
        }
    }

    pub fn numer(&self) -> &Poly<T> {
        &self.num
    }

    pub fn denom(&self) -> &Poly<T> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_constant() && self.num == Poly::one()
    }

    /// Standard germs are exactly the constants.
    pub fn is_constant(&self) -> bool {
        self.num.is_constant() && self.den.is_constant()
    }

    /// The constant value of a standard germ.
    pub fn as_constant(&self) -> Option<T> {
        self.is_constant().then(|| self.num.coeff(0))
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, GermError> {
        if rhs.is_zero() {
            return Err(GermError::DivisionByZero);
        }
        Ok(Self::reduce(&self.num * &rhs.den, &self.den * &rhs.num))
    }

    pub fn recip(&self) -> Result<Self, GermError> {
        Self::one().checked_div(self)
    }

    pub fn arith(&self, rhs: &Self, op: ArithOp) -> Result<Self, GermError> {
        Ok(match op {
            ArithOp::Add => self + rhs,
            ArithOp::Sub => self - rhs,
            ArithOp::Mul => self * rhs,
            ArithOp::Div => return self.checked_div(rhs),
        })
    }

    /// Integer power; negative exponents need a nonzero base.
    pub fn powi(&self, e: i64) -> Result<Self, GermError> {
        let mag = u32::try_from(e.unsigned_abs())
            .ok()
            .filter(|&m| m <= super::MAX_EXPONENT)
            .ok_or(GermError::ExponentTooLarge(e))?;
        let p = RatFn {
            num: self.num.pow(mag),
            den: self.den.pow(mag),
        };
        if e >= 0 {
            Ok(p)
        } else {
            p.recip()
        }
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::reduce(self.num.scale(c), self.den.clone())
    }

    pub fn abs(&self) -> Self {
        if self.signum() == Ordering::Less {
            -self
        } else {
            self.clone()
        }
    }

    /// The eventual sign; the denominator is monic so only the numerator matters.
    pub fn signum(&self) -> Ordering {
        self.num.eventual_sign()
    }

    pub fn compare(&self, other: &Self) -> Ordering {
        if let (Some(a), Some(b)) = (self.as_constant(), other.as_constant()) {
            return a.cmp(&b);
        }
        // both denominators are eventually positive, so cross-multiplying keeps the sign
        (&(&self.num * &other.den) - &(&other.num * &self.den)).eventual_sign()
    }

    pub fn valuation(&self) -> Valuation {
        match (self.num.degree(), self.den.degree()) {
            (Some(n), Some(d)) => Valuation::Order(n as i64 - d as i64),
            _ => Valuation::Bottom,
        }
    }

    pub fn shadow(&self) -> ExtendedShadow<T> {
        match self.valuation() {
            Valuation::Bottom => ExtendedShadow::Finite(T::zero()),
            Valuation::Order(v) if v < 0 => ExtendedShadow::Finite(T::zero()),
            Valuation::Order(0) => ExtendedShadow::Finite(self.num.leading() / self.den.leading()),
            Valuation::Order(_) => {
                if self.signum() == Ordering::Greater {
                    ExtendedShadow::PosInf
                } else {
                    ExtendedShadow::NegInf
                }
            }
        }
    }

    /// The shadow of a limited germ.
    pub fn standard_part(&self) -> Option<T> {
        match self.shadow() {
            ExtendedShadow::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn classify(&self) -> GermClass {
        match self.valuation() {
            Valuation::Bottom => GermClass::Zero,
            _ if self.is_constant() => GermClass::StandardNonzero,
            Valuation::Order(v) if v < 0 => GermClass::InfinitesimalNonzero,
            Valuation::Order(0) => GermClass::AppreciableNonstandard,
            _ => {
                if self.signum() == Ordering::Greater {
                    GermClass::UnlimitedPositive
                } else {
                    GermClass::UnlimitedNegative
                }
            }
        }
    }

    pub fn is_limited(&self) -> bool {
        self.valuation() <= Valuation::Order(0)
    }

    pub fn is_infinitesimal(&self) -> bool {
        self.valuation() < Valuation::Order(0)
    }

    /// `a ≃ b`: the difference is infinitesimal.
    pub fn infinitely_close(&self, other: &Self) -> bool {
        (self - other).is_infinitesimal()
    }

    /// A threshold `N₀` past which the sampled sequence has the eventual sign
    /// and a nonzero denominator.
    ///
    /// Uses the Cauchy root bound of `num·den`: for `n ≥ N₀` no root of either
    /// polynomial can be reached, so the sign of the quotient is frozen.
    pub fn eventually_threshold(&self) -> Result<u64, GermError> {
        if self.is_zero() {
            return Err(GermError::ZeroGerm);
        }
        let prod = &self.num * &self.den;
        if prod.is_constant() {
            return Ok(0);
        }
        prod.cauchy_root_bound()
            .ceil_u64()
            .ok_or(GermError::ThresholdOverflow)
    }

    /// Value of the defining sequence at index `n`; `None` at a pole.
    pub fn eval(&self, n: &T) -> Option<T> {
        let d = self.den.eval(n);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(n) / d)
        }
    }

    pub fn eval_u64(&self, n: u64) -> Option<T> {
        self.eval(&T::from_i64(n as i64))
    }

    /// Substitutes another germ for ω.
    pub fn compose(&self, inner: &Self) -> Result<Self, GermError> {
        let num = eval_poly_at_germ(&self.num, inner);
        let den = eval_poly_at_germ(&self.den, inner);
        num.checked_div(&den)
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

fn eval_poly_at_germ<T: Scalar>(p: &Poly<T>, g: &RatFn<T>) -> RatFn<T> {
    p.coeffs()
        .iter()
        .rev()
        .fold(RatFn::zero(), |acc, c| &(&acc * g) + &RatFn::constant(c.clone()))
}

/// Total order by eventual dominance.
impl<T: Scalar> Ord for RatFn<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        self.compare(other)
    }
}

impl<T: Scalar> PartialOrd for RatFn<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Scalar> Add for &RatFn<T> {
    type Output = RatFn<T>;
    fn add(self, rhs: &RatFn<T>) -> RatFn<T> {
        if self.den == rhs.den {
            return RatFn::reduce(&self.num + &rhs.num, self.den.clone());
        }
        RatFn::reduce(
            &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            &self.den * &rhs.den,
        )
    }
}

impl<T: Scalar> Sub for &RatFn<T> {
    type Output = RatFn<T>;
    fn sub(self, rhs: &RatFn<T>) -> RatFn<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &RatFn<T> {
    type Output = RatFn<T>;
    fn mul(self, rhs: &RatFn<T>) -> RatFn<T> {
        RatFn::reduce(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl<T: Scalar> Neg for &RatFn<T> {
    type Output = RatFn<T>;
    fn neg(self) -> RatFn<T> {
        RatFn {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<T: Scalar> Neg for RatFn<T> {
    type Output = RatFn<T>;
    fn neg(self) -> RatFn<T> {
        -&self
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl<T: Scalar> $tr for RatFn<T> {
            type Output = RatFn<T>;
            fn $m(self, rhs: RatFn<T>) -> RatFn<T> {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl<T: Scalar> From<T> for RatFn<T> {
    fn from(c: T) -> Self {
        RatFn::constant(c)
    }
}

impl<T: Scalar> fmt::Display for RatFn<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_constant() {
            return self.num.fmt_with("w", f);
        }
        let terms = |p: &Poly<T>| p.coeffs().iter().filter(|c| !c.is_zero()).count();
        let wrap_num = terms(&self.num) > 1 || !self.num.leading().is_integer();
        let wrap_den = terms(&self.den) > 1;
        struct P<'a, T>(&'a Poly<T>);
        impl<T: Scalar> fmt::Display for P<'_, T> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt_with("w", f)
            }
        }
        let n = P(&self.num);
        let d = P(&self.den);
        match (wrap_num, wrap_den) {
            (true, true) => write!(f, "({n})/({d})"),
            (true, false) => write!(f, "({n})/{d}"),
            (false, true) => write!(f, "{n}/({d})"),
            (false, false) => write!(f, "{n}/{d}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;
    use num_traits::Signed;

    type G = RatFn<BigRational>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_frac(n, d)
    }
    fn c(n: i64) -> G {
        G::from_i64(n)
    }
    fn w() -> G {
        G::omega()
    }

    #[test]
    fn inverse_pair_multiplies_to_one() {
        let inv = w().recip().unwrap();
        assert_eq!(w().arith(&inv, ArithOp::Mul).unwrap(), G::one());
    }

    #[test]
    fn subtraction_example() {
        assert_eq!((&w() + &c(1)).arith(&w(), ArithOp::Sub).unwrap(), c(1));
    }

    #[test]
    fn reduces_common_factor() {
        // (w^2 - 1)/(w + 1) + 1 = w, checked by evaluation at five integers
        let num = &(&w() * &w()) - &c(1);
        let g = num.checked_div(&(&w() + &c(1))).unwrap();
        let sum = g.arith(&G::one(), ArithOp::Add).unwrap();
        for n in [2, 3, 5, 7, 11] {
            let lhs = (q(n * n - 1, 1) / q(n + 1, 1)) + q(1, 1);
            assert_eq!(sum.eval_u64(n as u64).unwrap(), lhs);
        }
        assert_eq!(sum, w());
        assert_eq!(g, &w() - &c(1));
    }

    #[test]
    fn division_by_zero_rejected() {
        assert_eq!(w().checked_div(&G::zero()), Err(GermError::DivisionByZero));
        assert!(G::from_parts(Poly::one(), Poly::zero()).is_err());
    }

    #[test]
    fn compare_examples() {
        assert_eq!(w().compare(&c(1_000_000)), Ordering::Greater);
        assert_eq!(w().recip().unwrap().compare(&G::zero()), Ordering::Greater);
        let a = (&(&c(2) * &w()) + &c(3)).checked_div(&(&w() + &c(1))).unwrap();
        // (2n+3)/(n+1) - 2 = 1/(n+1) > 0 at n = 10, 100, 1000
        for n in [10u64, 100, 1000] {
            assert!(a.eval_u64(n).unwrap() > q(2, 1));
        }
        assert_eq!(a.compare(&c(2)), Ordering::Greater);
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(w().valuation(), Valuation::Order(1));
        assert_eq!((&c(3) + &w().recip().unwrap()).valuation(), Valuation::Order(0));
        let den = &(&w() * &(&w() * &w())) - &w();
        let g = (&w() + &c(2)).checked_div(&den).unwrap();
        assert_eq!(g.valuation(), Valuation::Order(-2));
        assert_eq!(G::zero().valuation(), Valuation::Bottom);
        assert!(Valuation::Bottom < Valuation::Order(-1000));
    }

    #[test]
    fn shadow_examples() {
        assert_eq!(w().recip().unwrap().shadow(), ExtendedShadow::Finite(q(0, 1)));
        assert_eq!(w().shadow(), ExtendedShadow::PosInf);
        assert_eq!((-w()).shadow(), ExtendedShadow::NegInf);
        let num = &(&c(2) * &(&w() * &w())) + &c(3);
        let den = &(&w() * &w()) - &w();
        let g = num.checked_div(&den).unwrap();
        assert_eq!(g.shadow(), ExtendedShadow::Finite(q(2, 1)));
        // numeric oracle: values at 10^3 and 10^6 approach 2
        let e3 = g.eval_u64(1000).unwrap() - q(2, 1);
        let e6 = g.eval_u64(1_000_000).unwrap() - q(2, 1);
        assert!(e3.abs() < q(1, 100));
        assert!(e6.abs() < q(1, 100_000));
    }

    #[test]
    fn classify_examples() {
        assert_eq!(G::constant(q(7, 3)).classify(), GermClass::StandardNonzero);
        assert_eq!((&w() * &w()).recip().unwrap().classify(), GermClass::InfinitesimalNonzero);
        let g = &c(2) + &(&c(5) * &w().recip().unwrap());
        assert_eq!(g.valuation(), Valuation::Order(0));
        assert!(!g.is_constant());
        assert_eq!(g.classify(), GermClass::AppreciableNonstandard);
        assert_eq!(G::zero().classify(), GermClass::Zero);
        assert_eq!((-w()).classify(), GermClass::UnlimitedNegative);
    }

    fn check_threshold(g: &G, n0: u64, upto: u64) {
        let sign = g.signum();
        for n in n0..upto {
            let v = g.eval_u64(n).expect("pole past threshold");
            assert_eq!(v.cmp(&q(0, 1)), sign, "sign flip at n = {n}");
        }
    }

    #[test]
    fn threshold_examples() {
        let a = &w() - &c(5);
        let n0 = a.eventually_threshold().unwrap();
        assert!(n0 >= 6);
        check_threshold(&a, n0, n0 + 500);

        let b = &(&w() - &c(100)) * &(&w() - &c(2));
        let n0 = b.eventually_threshold().unwrap();
        assert!(n0 >= 101);
        check_threshold(&b, n0, n0 + 500);

        let r = w().recip().unwrap();
        let n0 = r.eventually_threshold().unwrap();
        assert!(n0 >= 1);
        check_threshold(&r, n0, 200);

        assert_eq!(G::zero().eventually_threshold(), Err(GermError::ZeroGerm));
    }

    #[test]
    fn powi_and_compose() {
        assert_eq!(w().powi(-2).unwrap(), (&w() * &w()).recip().unwrap());
        assert!(G::zero().powi(-1).is_err());
        let sq = (&w() * &w()).compose(&(&w() + &c(1))).unwrap();
        assert_eq!(sq, &(&(&w() * &w()) + &(&c(2) * &w())) + &c(1));
    }

    #[test]
    fn display_forms() {
        let num = &(&c(2) * &(&w() * &w())) + &c(3);
        let den = &(&w() * &w()) - &w();
        let g = num.checked_div(&den).unwrap();
        assert_eq!(g.to_string(), "(2*w^2 + 3)/(w^2 - w)");
        assert_eq!(w().recip().unwrap().to_string(), "1/w");
        assert_eq!(G::constant(q(-7, 3)).to_string(), "-7/3");
    }
}
