//! Counting and Loeb measures on the hyperfinite time line.
//!
//! Internal sets are finite unions of intervals with germ endpoints. The
//! counting measure of such a set is not itself a rational function of `ω`,
//! so it is bracketed by two germs whose shadows agree; that common shadow is
//! the Loeb measure. Standard interval expressions are measured through their
//! nonstandard extension, which recovers Lebesgue measure on `[0, 1]`.

mod set;
mod sigma;

use thiserror::Error;

pub use set::{InternalSet, Piece, TimeLine};
pub use sigma::{sigma_limit, Generator, KPiece, SigmaCertificate, SigmaFamily, SigmaMode, MAX_PIECES};

use crate::coding::{Bound, GermPredicate};
use crate::germfield::{GermError, RatFn};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoebError {
    #[error("time line size `{0}` is not an unlimited integer")]
    BadTimeLine(String),
    #[error("sets overlap: {0}")]
    NotDisjoint(String),
    #[error("additivity fails: {0}")]
    NotAdditive(String),
    #[error("not in the interval algebra: {0}")]
    OutOfAlgebra(String),
    #[error("declared mode `{mode}` fails at k = {k}")]
    ModeViolation { mode: SigmaMode, k: u64 },
    #[error("closed form disagrees with the computed value at k = {0}")]
    ClosedFormMismatch(u64),
    #[error("limit is not finite")]
    InfiniteLimit,
    #[error("{0}")]
    BadFamily(String),
    #[error(transparent)]
    Germ(#[from] GermError),
}

/// Counting-measure bounds together with their common shadow.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MeasureValue<T> {
    pub loeb: T,
    pub lower: RatFn<T>,
    pub upper: RatFn<T>,
}

/// Germ bounds on `|X ∩ T| / |T|`.
///
/// An interval of length `L` holds between `L·N - 1` and `L·N + 1` grid
/// points, and `|T| = N + 1`.
pub fn counting_measure<T: Scalar>(x: &InternalSet<T>) -> (RatFn<T>, RatFn<T>) {
    let n = x.timeline().n();
    let width = x.pieces().iter().fold(RatFn::zero(), |acc, p| &acc + &(&p.hi - &p.lo));
    let slack = RatFn::from_i64(x.pieces().len() as i64);
    let scaled = &width * n;
    let size = n + &RatFn::one();
    let lower = (&scaled - &slack).checked_div(&size).expect("N + 1 is nonzero");
    let upper = (&scaled + &slack).checked_div(&size).expect("N + 1 is nonzero");
    (lower, upper)
}

/// Sum of the shadow widths of the pieces.
pub fn loeb_measure<T: Scalar>(x: &InternalSet<T>) -> T {
    let total = x.pieces().iter().fold(T::zero(), |acc, p| {
        let w = p.hi.standard_part().expect("bounded") - p.lo.standard_part().expect("bounded");
        acc + w
    });
    total.clamp(T::zero(), T::one())
}

pub fn measure<T: Scalar>(x: &InternalSet<T>) -> MeasureValue<T> {
    let (lower, upper) = counting_measure(x);
    MeasureValue { loeb: loeb_measure(x), lower, upper }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdditivityReport<T> {
    pub first: T,
    pub second: T,
    pub union: T,
}

pub fn finite_additivity_check<T: Scalar>(
    a: &InternalSet<T>,
    b: &InternalSet<T>,
) -> Result<AdditivityReport<T>, LoebError> {
    let overlap = a.intersection(b);
    if !overlap.is_empty() {
        return Err(LoebError::NotDisjoint(overlap.to_string()));
    }
    let report = AdditivityReport {
        first: loeb_measure(a),
        second: loeb_measure(b),
        union: loeb_measure(&a.union(b)),
    };
    if report.first.clone() + report.second.clone() != report.union {
        return Err(LoebError::NotAdditive(format!(
            "{} + {} != {}",
            report.first, report.second, report.union
        )));
    }
    Ok(report)
}

fn bound_piece<T: Scalar>(b: &Bound<T>, lower: bool) -> Result<(RatFn<T>, bool), LoebError> {
    match b {
        Bound::Unbounded if lower => Ok((RatFn::zero(), true)),
        Bound::Unbounded => Ok((RatFn::one(), true)),
        Bound::Closed(c) => Ok((c.clone(), true)),
        Bound::Open(c) => Ok((c.clone(), false)),
        Bound::HaloClosed(c) | Bound::HaloOpen(c) => {
            Err(LoebError::OutOfAlgebra(format!("halo bound at {c}")))
        }
    }
}

/// The internal set carved out of `[0, 1]` by a Boolean combination of
/// germ intervals.
pub fn internal_set<T: Scalar>(pred: &GermPredicate<T>, tl: &TimeLine<T>) -> Result<InternalSet<T>, LoebError> {
    Ok(match pred {
        GermPredicate::Empty => InternalSet::empty(tl.clone()),
        GermPredicate::All => InternalSet::unit(tl.clone()),
        GermPredicate::Interval(i) => {
            let (lo, lc) = bound_piece(&i.lo, true)?;
            let (hi, hc) = bound_piece(&i.hi, false)?;
            InternalSet::new(tl.clone(), vec![Piece::new(lo, lc, hi, hc)])
        }
        GermPredicate::Not(p) => internal_set(p, tl)?.complement(),
        GermPredicate::And(a, b) => internal_set(a, tl)?.intersection(&internal_set(b, tl)?),
        GermPredicate::Or(a, b) => internal_set(a, tl)?.union(&internal_set(b, tl)?),
        GermPredicate::Limited | GermPredicate::Infinitesimal | GermPredicate::Standard => {
            return Err(LoebError::OutOfAlgebra(format!("`{pred}` is external")))
        }
    })
}

/// Lebesgue measure of a standard interval expression, computed as the Loeb
/// measure of its extension.
pub fn lebesgue<T: Scalar>(pred: &GermPredicate<T>) -> Result<T, LoebError> {
    let x = internal_set(pred, &TimeLine::default())?;
    if let Some(p) = x.pieces().iter().find(|p| !p.lo.is_constant() || !p.hi.is_constant()) {
        return Err(LoebError::OutOfAlgebra(format!("nonstandard endpoint in {p}")));
    }
    Ok(loeb_measure(&x))
}
