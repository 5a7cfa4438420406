//! The definable hyperrational field ℚ(ω).
//!
//! A germ is a reduced rational function of the index, read "at infinity":
//! every first-order property of the defining sequence that holds for all
//! large integers holds of the germ. Since all nonprincipal ultrafilters
//! contain the cofinite sets, the choice of ultrafilter never matters here.

mod bivariate;
mod germ;
mod poly;
mod seq;

use thiserror::Error;

pub use bivariate::{BiPoly, BivariateGerm};
pub use germ::{ArithOp, ExtendedShadow, GermClass, RatFn, Valuation};
pub use poly::Poly;
pub use seq::ExpSeq;

/// Largest exponent accepted by the power operations.
pub const MAX_EXPONENT: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GermError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero germ has no eventual sign")]
    ZeroGerm,
    #[error("sign threshold does not fit in 64 bits")]
    ThresholdOverflow,
    #[error("exponent {0} is too large")]
    ExponentTooLarge(i64),
    #[error("denominator vanishes identically on the diagonal k = w")]
    DegenerateDiagonal,
    #[error("family denominator vanishes identically at k = {0}")]
    InvalidInstance(u64),
    #[error("exponential bases must be positive")]
    NonPositiveBase,
    #[error("can only divide by a single exponential term")]
    NotSingleTerm,
    #[error("no closed-form partial sum: {0}")]
    UnsupportedSum(String),
}
