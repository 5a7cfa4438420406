use std::cmp::Ordering;
use std::fmt;

use super::LoebError;
use crate::germfield::RatFn;
use crate::scalar::Scalar;

/// The grid `{i/N : 0 ≤ i ≤ N}` for an unlimited integer `N`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TimeLine<T> {
    n: RatFn<T>,
}

impl<T: Scalar> TimeLine<T> {
    pub fn new(n: RatFn<T>) -> Result<Self, LoebError> {
        let ok = n.is_polynomial()
            && n.numer().is_integer_valued()
            && n.classify() == crate::germfield::GermClass::UnlimitedPositive;
        if !ok {
            return Err(LoebError::BadTimeLine(n.to_string()));
        }
        Ok(TimeLine { n })
    }

    pub fn n(&self) -> &RatFn<T> {
        &self.n
    }
}

impl<T: Scalar> Default for TimeLine<T> {
    fn default() -> Self {
        TimeLine { n: RatFn::omega() }
    }
}

/// An interval with germ endpoints.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Piece<T> {
    pub lo: RatFn<T>,
    pub lo_closed: bool,
    pub hi: RatFn<T>,
    pub hi_closed: bool,
}

impl<T: Scalar> Piece<T> {
    pub fn new(lo: RatFn<T>, lo_closed: bool, hi: RatFn<T>, hi_closed: bool) -> Self {
        Piece { lo, lo_closed, hi, hi_closed }
    }

    pub fn closed(lo: RatFn<T>, hi: RatFn<T>) -> Self {
        Self::new(lo, true, hi, true)
    }

    pub fn point(c: RatFn<T>) -> Self {
        Self::closed(c.clone(), c)
    }

    pub fn is_empty(&self) -> bool {
        match self.lo.cmp(&self.hi) {
            Ordering::Less => false,
            Ordering::Equal => !(self.lo_closed && self.hi_closed),
            Ordering::Greater => true,
        }
    }

    pub fn contains(&self, x: &RatFn<T>) -> bool {
        let lo = if self.lo_closed { x >= &self.lo } else { x > &self.lo };
        let hi = if self.hi_closed { x <= &self.hi } else { x < &self.hi };
        lo && hi
    }

    fn intersect(&self, other: &Self) -> Self {
        let (lo, lo_closed) = match self.lo.cmp(&other.lo) {
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Piece { lo, lo_closed, hi, hi_closed }
    }

    /// Whether `next` (starting no earlier) overlaps or abuts this piece
    /// without a gap.
    fn joins(&self, next: &Self) -> bool {
        match next.lo.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed || next.lo_closed,
            Ordering::Greater => false,
        }
    }
}

impl<T: Scalar> fmt::Display for Piece<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lo == self.hi && self.lo_closed && self.hi_closed {
            return write!(f, "{{{}}}", self.lo);
        }
        let l = if self.lo_closed { '[' } else { '(' };
        let r = if self.hi_closed { ']' } else { ')' };
        write!(f, "{l}{}, {}{r}", self.lo, self.hi)
    }
}

/// A finite union of germ intervals inside `[0, 1]`, kept sorted, disjoint
/// and with adjacent pieces merged.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct InternalSet<T> {
    timeline: TimeLine<T>,
    pieces: Vec<Piece<T>>,
}

fn cmp_lo<T: Scalar>(a: &Piece<T>, b: &Piece<T>) -> Ordering {
    // a closed left end starts before an open one at the same point
    a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed))
}

impl<T: Scalar> InternalSet<T> {
    /// Clips every piece to `[0, 1]` and normalizes.
    pub fn new(timeline: TimeLine<T>, pieces: Vec<Piece<T>>) -> Self {
        let unit = Piece::closed(RatFn::zero(), RatFn::one());
        let mut ps: Vec<Piece<T>> =
            pieces.iter().map(|p| p.intersect(&unit)).filter(|p| !p.is_empty()).collect();
        ps.sort_by(cmp_lo);
        let mut out: Vec<Piece<T>> = Vec::with_capacity(ps.len());
        for p in ps {
            match out.last_mut() {
                Some(last) if last.joins(&p) => match p.hi.cmp(&last.hi) {
                    Ordering::Greater => {
                        last.hi = p.hi;
                        last.hi_closed = p.hi_closed;
                    }
                    Ordering::Equal => last.hi_closed |= p.hi_closed,
                    Ordering::Less => {}
                },
                _ => out.push(p),
            }
        }
        InternalSet { timeline, pieces: out }
    }

    pub fn on_default(pieces: Vec<Piece<T>>) -> Self {
        Self::new(TimeLine::default(), pieces)
    }

    pub fn empty(timeline: TimeLine<T>) -> Self {
        InternalSet { timeline, pieces: Vec::new() }
    }

    pub fn unit(timeline: TimeLine<T>) -> Self {
        Self::new(timeline, vec![Piece::closed(RatFn::zero(), RatFn::one())])
    }

    pub fn timeline(&self) -> &TimeLine<T> {
        &self.timeline
    }

    pub fn pieces(&self) -> &[Piece<T>] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn contains(&self, x: &RatFn<T>) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut ps = self.pieces.clone();
        ps.extend(other.pieces.iter().cloned());
        Self::new(self.timeline.clone(), ps)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        // both lists are sorted and disjoint: advance whichever piece ends first
        let (a, b) = (&self.pieces, &other.pieces);
        let (mut i, mut j) = (0, 0);
        let mut ps = Vec::new();
        while i < a.len() && j < b.len() {
            let c = a[i].intersect(&b[j]);
            if !c.is_empty() {
                ps.push(c);
            }
            let a_first = match a[i].hi.cmp(&b[j].hi) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => !a[i].hi_closed || b[j].hi_closed,
            };
            if a_first {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::new(self.timeline.clone(), ps)
    }

    /// Complement inside `[0, 1]`.
    pub fn complement(&self) -> Self {
        let mut ps = Vec::new();
        let mut cur = (RatFn::zero(), true);
        for p in &self.pieces {
            ps.push(Piece::new(cur.0.clone(), cur.1, p.lo.clone(), !p.lo_closed));
            cur = (p.hi.clone(), !p.hi_closed);
        }
        ps.push(Piece::new(cur.0, cur.1, RatFn::one(), true));
        Self::new(self.timeline.clone(), ps)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.intersection(&other.complement())
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.difference(other).is_empty()
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }
}

impl<T: Scalar> fmt::Display for InternalSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "empty");
        }
        for (i, p) in self.pieces.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}
