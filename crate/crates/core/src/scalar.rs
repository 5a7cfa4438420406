//! Coefficient scalars.
//!
//! Everything above this module is written against [`Scalar`], an exact ordered
//! field. Canonical forms rely on structural equality, so floating point types
//! deliberately do not qualify: `f64` is neither `Ord` nor `Hash`.

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

/// An exact ordered field usable as a polynomial coefficient.
pub trait Scalar:
    Clone + Debug + Display + Ord + Hash + Num + Signed + Send + Sync + 'static
{
    fn from_i64(n: i64) -> Self;

    fn from_frac(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }

    fn is_integer(&self) -> bool;

    /// Smallest integer `>= self`, if it fits a `u64` (negative values give `Some(0)`).
    fn ceil_u64(&self) -> Option<u64>;

    /// Largest integer `<= self` as an `i128`, when representable.
    fn floor_i128(&self) -> Option<i128>;
}

impl<I> Scalar for Ratio<I>
where
    I: Integer
        + Clone
        + Debug
        + Display
        + Hash
        + Signed
        + ToPrimitive
        + FromPrimitive
        + Send
        + Sync
        + 'static,
{
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(I::from_i64(n).expect("i64 fits the integer type"))
    }

    fn is_integer(&self) -> bool {
        Ratio::is_integer(self)
    }

    fn ceil_u64(&self) -> Option<u64> {
        if self.is_negative() {
            return Some(0);
        }
        self.ceil().to_integer().to_u64()
    }

    fn floor_i128(&self) -> Option<i128> {
        self.floor().to_integer().to_i128()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::{BigRational, Rational64};

    #[test]
    fn ceil_and_floor() {
        let x = Rational64::new(7, 2);
        assert_eq!(x.ceil_u64(), Some(4));
        assert_eq!(x.floor_i128(), Some(3));
        assert_eq!(Rational64::new(-7, 2).ceil_u64(), Some(0));
        assert_eq!(Rational64::new(-7, 2).floor_i128(), Some(-4));
        let big = BigRational::new(BigInt::from(10).pow(30), BigInt::from(1));
        assert_eq!(big.ceil_u64(), None);
    }

    #[test]
    fn frac_constructor() {
        assert_eq!(BigRational::from_frac(6, 4), BigRational::new(3.into(), 2.into()));
        assert!(<Rational64 as Scalar>::is_integer(&Rational64::from_frac(4, 2)));
    }
}
