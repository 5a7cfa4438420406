//! Standard sequences in `k` of the form `Σ R_r(k) · r^k` with positive bases.
//!
//! These describe endpoints and measures of countable families. Their limits
//! are read off exactly: bases above one dominate, base one contributes the
//! shadow of its rational factor (taken in the `k` variable), and bases below
//! one vanish.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::germ::{ExtendedShadow, RatFn};
use super::GermError;
use crate::scalar::Scalar;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExpSeq<T> {
    /// base -> rational coefficient in `k`; no zero coefficients.
    terms: BTreeMap<T, RatFn<T>>,
}

impl<T: Scalar> ExpSeq<T> {
    pub fn zero() -> Self {
        ExpSeq { terms: BTreeMap::new() }
    }

    pub fn from_ratfn(r: RatFn<T>) -> Self {
        Self::term(T::one(), r)
    }

    pub fn constant(c: T) -> Self {
        Self::from_ratfn(RatFn::constant(c))
    }

    /// The index `k` itself.
    pub fn k() -> Self {
        Self::from_ratfn(RatFn::omega())
    }

    fn term(base: T, coeff: RatFn<T>) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(base, coeff);
        }
        ExpSeq { terms }
    }

    /// `base^(slope·k + offset)`.
    pub fn exp_affine(base: &T, slope: i64, offset: i64) -> Result<Self, GermError> {
        if !base.is_positive() {
            return Err(GermError::NonPositiveBase);
        }
        let b = RatFn::constant(base.clone()).powi(offset)?.as_constant().expect("constant");
        let r = RatFn::constant(base.clone()).powi(slope)?.as_constant().expect("constant");
        Ok(Self::term(r, RatFn::constant(b)))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The plain rational function when no exponential part is present.
    pub fn as_ratfn(&self) -> Option<RatFn<T>> {
        match self.terms.len() {
            0 => Some(RatFn::zero()),
            1 => self.terms.get(&T::one()).cloned(),
            _ => None,
        }
    }

    pub fn as_constant(&self) -> Option<T> {
        self.as_ratfn().and_then(|r| r.as_constant())
    }

    pub fn terms(&self) -> impl Iterator<Item = (&T, &RatFn<T>)> {
        self.terms.iter()
    }

    fn add_term(&mut self, base: T, coeff: RatFn<T>) {
        let sum = match self.terms.remove(&base) {
            Some(c) => &c + &coeff,
            None => coeff,
        };
        if !sum.is_zero() {
            self.terms.insert(base, sum);
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, GermError> {
        if rhs.is_zero() {
            return Err(GermError::DivisionByZero);
        }
        if rhs.terms.len() != 1 {
            return Err(GermError::NotSingleTerm);
        }
        let (base, coeff) = rhs.terms.iter().next().expect("one term");
        let inv = ExpSeq::term(T::one() / base.clone(), coeff.recip()?);
        Ok(self * &inv)
    }

    pub fn powi(&self, e: i64) -> Result<Self, GermError> {
        if e.unsigned_abs() > super::MAX_EXPONENT as u64 {
            return Err(GermError::ExponentTooLarge(e));
        }
        let mut acc = Self::constant(T::one());
        for _ in 0..e.unsigned_abs() {
            acc = &acc * self;
        }
        if e < 0 {
            Self::constant(T::one()).checked_div(&acc)
        } else {
            Ok(acc)
        }
    }

    /// Exact value at `k`; `None` at a pole of some coefficient.
    pub fn eval(&self, k: u64) -> Option<T> {
        let kk = T::from_i64(k as i64);
        let mut sum = T::zero();
        for (base, coeff) in &self.terms {
            let mut p = T::one();
            for _ in 0..k {
                p = p * base.clone();
            }
            sum = sum + coeff.eval(&kk)? * p;
        }
        Some(sum)
    }

    /// Limit as `k → ∞`.
    pub fn limit(&self) -> ExtendedShadow<T> {
        let one = T::one();
        match self.terms.iter().next_back() {
            None => ExtendedShadow::Finite(T::zero()),
            Some((base, coeff)) if *base > one => {
                if coeff.signum() == Ordering::Greater {
                    ExtendedShadow::PosInf
                } else {
                    ExtendedShadow::NegInf
                }
            }
            _ => match self.terms.get(&one) {
                Some(coeff) => coeff.shadow(),
                None => ExtendedShadow::Finite(T::zero()),
            },
        }
    }

    /// Closed form of `S(k) = Σ_{j=start}^{k} self(j)`.
    ///
    /// Supported when every coefficient is constant: geometric terms for
    /// bases other than one, and a linear term for base one.
    pub fn partial_sums(&self, start: u64) -> Result<Self, GermError> {
        let one = T::one();
        let s = T::from_i64(start as i64);
        let mut out = ExpSeq::zero();
        for (base, coeff) in &self.terms {
            let c = coeff.as_constant().ok_or_else(|| {
                GermError::UnsupportedSum(format!("coefficient {coeff} of base {base} is not constant"))
            })?;
            if *base == one {
                // c·(k - start + 1)
                let lin = &(&RatFn::omega() - &RatFn::constant(s.clone())) + &RatFn::one();
                out.add_term(one.clone(), lin.scale(&c));
            } else {
                // c·(r^start - r^(k+1)) / (1 - r)
                let denom = one.clone() - base.clone();
                let r_start = pow(base, start);
                out.add_term(one.clone(), RatFn::constant(c.clone() * r_start / denom.clone()));
                out.add_term(
                    base.clone(),
                    RatFn::constant(-(c * base.clone()) / denom),
                );
            }
        }
        Ok(out)
    }
}

fn pow<T: Scalar>(base: &T, e: u64) -> T {
    (0..e).fold(T::one(), |acc, _| acc * base.clone())
}

impl<T: Scalar> Add for &ExpSeq<T> {
    type Output = ExpSeq<T>;
    fn add(self, rhs: &ExpSeq<T>) -> ExpSeq<T> {
        let mut out = self.clone();
        for (b, c) in &rhs.terms {
            out.add_term(b.clone(), c.clone());
        }
        out
    }
}

impl<T: Scalar> Neg for &ExpSeq<T> {
    type Output = ExpSeq<T>;
    fn neg(self) -> ExpSeq<T> {
        ExpSeq {
            terms: self.terms.iter().map(|(b, c)| (b.clone(), -c)).collect(),
        }
    }
}

impl<T: Scalar> Sub for &ExpSeq<T> {
    type Output = ExpSeq<T>;
    fn sub(self, rhs: &ExpSeq<T>) -> ExpSeq<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &ExpSeq<T> {
    type Output = ExpSeq<T>;
    fn mul(self, rhs: &ExpSeq<T>) -> ExpSeq<T> {
        let mut out = ExpSeq::zero();
        for (b1, c1) in &self.terms {
            for (b2, c2) in &rhs.terms {
                out.add_term(b1.clone() * b2.clone(), c1 * c2);
            }
        }
        out
    }
}

impl<T: Scalar> fmt::Display for ExpSeq<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (base, coeff)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            let c = coeff.to_string().replace('w', "k");
            if base.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "({c})*({base})^k")?;
            }
        }
        Ok(())
    }
}
