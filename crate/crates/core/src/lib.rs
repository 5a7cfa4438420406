//! Exact computation in a decidable fragment of internal nonstandard analysis.
//!
//! The numeric core is generic over an exact [`Scalar`] field; the aliases
//! below fix it to arbitrary-precision rationals, which is what the parser
//! and command line use.
//!
//! ```
//! use hyperq::exprlang::{parse, to_germ, Mode};
//! use hyperq::{Germ, Q};
//!
//! # fn main() -> Result<(), Box<dyn std::error::Error>> {
//! let g: Germ = to_germ(&parse("(2*w^2 + 3)/(w^2 - w)", Mode::Germ)?)?;
//! assert_eq!(g.standard_part(), Some(Q::from_integer(2.into())));
//! assert!(g.compare(&Germ::from_i64(2)).is_gt());
//! # Ok(())
//! # }
//! ```

pub mod coding;
pub mod exprlang;
pub mod extnum;
pub mod germfield;
pub mod hull;
pub mod loeb;
pub mod scalar;
pub mod strucmodel;

pub use scalar::Scalar;

/// Arbitrary-precision rational.
pub type Q = num_rational::BigRational;

/// A definable hyperrational over [`Q`].
pub type Germ = germfield::RatFn<Q>;
pub type Shadow = germfield::ExtendedShadow<Q>;
pub type Bivariate = germfield::BivariateGerm<Q>;
pub type KSeq = germfield::ExpSeq<Q>;

/// Germs with machine-word rational coefficients (overflow panics).
pub type Germ64 = germfield::RatFn<num_rational::Rational64>;

/// A coded external subset of the germ universe over [`Q`].
pub type CodedSet = coding::CodedSet<Q>;
pub type Predicate = coding::GermPredicate<Q>;
pub type HullPoint = hull::HullPoint<Q>;
pub type InternalSet = loeb::InternalSet<Q>;
pub type SigmaFamily = loeb::SigmaFamily<Q>;
pub type ExternalNumber = extnum::ExternalNumber<Q>;
