use std::fmt;

use rayon::prelude::*;

use super::{loeb_measure, InternalSet, LoebError, Piece, TimeLine};
use crate::germfield::{ExpSeq, ExtendedShadow, GermError, RatFn};
use crate::scalar::Scalar;

/// An interval whose endpoints are standard sequences in `k`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KPiece<T> {
    pub lo: ExpSeq<T>,
    pub lo_closed: bool,
    pub hi: ExpSeq<T>,
    pub hi_closed: bool,
}

impl<T: Scalar> KPiece<T> {
    pub fn new(lo: ExpSeq<T>, lo_closed: bool, hi: ExpSeq<T>, hi_closed: bool) -> Self {
        KPiece { lo, lo_closed, hi, hi_closed }
    }

    fn at(&self, k: u64) -> Result<Piece<T>, LoebError> {
        let ev = |s: &ExpSeq<T>| s.eval(k).map(RatFn::constant).ok_or(GermError::InvalidInstance(k));
        Ok(Piece::new(ev(&self.lo)?, self.lo_closed, ev(&self.hi)?, self.hi_closed))
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Generator<T> {
    /// `F(k)` is the union of the listed intervals at `k`.
    Intervals(Vec<KPiece<T>>),
    /// `F(0) = [0, 1]` and `F(k+1)` is the union of the images of `F(k)`
    /// under the affine maps `x ↦ r·x + b`, given as `(r, b)`.
    SelfSimilar(Vec<(T, T)>),
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SigmaMode {
    Increasing,
    Decreasing,
    Disjoint,
}

impl fmt::Display for SigmaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SigmaMode::Increasing => "increasing",
            SigmaMode::Decreasing => "decreasing",
            SigmaMode::Disjoint => "disjoint",
        })
    }
}

/// Levels of a self-similar family are built explicitly up to this many pieces.
pub const MAX_PIECES: usize = 4096;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SigmaFamily<T> {
    pub generator: Generator<T>,
    pub mode: SigmaMode,
    pub start: u64,
}

impl<T: Scalar> SigmaFamily<T> {
    pub fn intervals(pieces: Vec<KPiece<T>>, mode: SigmaMode, start: u64) -> Self {
        SigmaFamily { generator: Generator::Intervals(pieces), mode, start }
    }

    /// Middle-thirds Cantor construction.
    pub fn cantor() -> Self {
        let third = T::from_frac(1, 3);
        SigmaFamily {
            generator: Generator::SelfSimilar(vec![(third.clone(), T::zero()), (third, T::from_frac(2, 3))]),
            mode: SigmaMode::Decreasing,
            start: 0,
        }
    }

    /// `F(k)` on the default time line, or `None` when a self-similar level
    /// would exceed [`MAX_PIECES`].
    pub fn member(&self, k: u64) -> Result<Option<InternalSet<T>>, LoebError> {
        let tl = TimeLine::default();
        match &self.generator {
            Generator::Intervals(ps) => {
                let pieces = ps.iter().map(|p| p.at(k)).collect::<Result<_, _>>()?;
                Ok(Some(InternalSet::new(tl, pieces)))
            }
            Generator::SelfSimilar(maps) => {
                let fits = u32::try_from(k)
                    .ok()
                    .and_then(|e| maps.len().checked_pow(e))
                    .is_some_and(|n| n <= MAX_PIECES);
                if !fits {
                    return Ok(None);
                }
                let mut level = vec![Piece::closed(RatFn::zero(), RatFn::one())];
                for _ in 0..k {
                    level = maps
                        .iter()
                        .flat_map(|(r, b)| level.iter().map(move |p| image(p, r, b)))
                        .collect();
                }
                Ok(Some(InternalSet::new(tl, level)))
            }
        }
    }

    /// The measure of `F(k)` as a sequence in `k`, valid when the pieces
    /// stay disjoint inside `[0, 1]`.
    fn closed_form(&self) -> Result<ExpSeq<T>, LoebError> {
        match &self.generator {
            Generator::Intervals(ps) => Ok(ps.iter().fold(ExpSeq::zero(), |acc, p| &acc + &(&p.hi - &p.lo))),
            Generator::SelfSimilar(maps) => {
                let ratio = maps.iter().fold(T::zero(), |acc, (r, _)| acc + r.clone());
                Ok(ExpSeq::exp_affine(&ratio, 1, 0)?)
            }
        }
    }

    fn check_self_similar(&self) -> Result<(), LoebError> {
        let Generator::SelfSimilar(maps) = &self.generator else { return Ok(()) };
        if self.mode != SigmaMode::Decreasing {
            return Err(LoebError::BadFamily("self-similar families are decreasing".into()));
        }
        let unit = Piece::closed(RatFn::zero(), RatFn::one());
        let images: Vec<InternalSet<T>> = maps
            .iter()
            .map(|(r, b)| InternalSet::on_default(vec![image(&unit, r, b)]))
            .collect();
        for (i, (r, _)) in maps.iter().enumerate() {
            if !r.is_positive() {
                return Err(LoebError::BadFamily(format!("ratio {r} is not positive")));
            }
            if images[i].pieces().first() != Some(&image(&unit, r, &maps[i].1)) {
                return Err(LoebError::BadFamily(format!("map {i} leaves [0, 1]")));
            }
            for other in &images[..i] {
                if !images[i].is_disjoint(other) {
                    return Err(LoebError::BadFamily(format!("map {i} overlaps an earlier image")));
                }
            }
        }
        Ok(())
    }

    /// Measure of `F(k)`. Self-similar levels beyond [`MAX_PIECES`] follow
    /// from the previous level: disjoint images scale the measure by the
    /// ratio sum.
    fn measures(&self, depth: u64) -> Result<Vec<(u64, T)>, LoebError> {
        let ks: Vec<u64> = (self.start..=depth).collect();
        let built: Vec<Option<T>> = ks
            .par_iter()
            .map(|&k| Ok(self.member(k)?.map(|x| loeb_measure(&x))))
            .collect::<Result<_, LoebError>>()?;
        let ratio = match &self.generator {
            Generator::SelfSimilar(maps) => maps.iter().fold(T::zero(), |acc, (r, _)| acc + r.clone()),
            Generator::Intervals(_) => T::one(),
        };
        let mut out: Vec<(u64, T)> = Vec::with_capacity(ks.len());
        for (k, m) in ks.into_iter().zip(built) {
            let m = match m {
                Some(m) => m,
                None => {
                    let prev = out.last().map(|(_, v)| v.clone()).ok_or(LoebError::BadFamily(
                        "first level is too large to build".into(),
                    ))?;
                    prev * ratio.clone()
                }
            };
            out.push((k, m));
        }
        Ok(out)
    }

    fn check_mode(&self, depth: u64) -> Result<(), LoebError> {
        self.check_self_similar()?;
        let mut seen: Vec<InternalSet<T>> = Vec::new();
        for k in self.start..=depth {
            let Some(cur) = self.member(k)? else { break };
            let ok = match (self.mode, seen.last()) {
                (_, None) => true,
                (SigmaMode::Increasing, Some(prev)) => prev.is_subset(&cur),
                (SigmaMode::Decreasing, Some(prev)) => cur.is_subset(prev),
                (SigmaMode::Disjoint, _) => seen.iter().all(|s| s.is_disjoint(&cur)),
            };
            if !ok {
                return Err(LoebError::ModeViolation { mode: self.mode, k });
            }
            seen.push(cur);
        }
        Ok(())
    }
}

fn image<T: Scalar>(p: &Piece<T>, r: &T, b: &T) -> Piece<T> {
    let f = |g: &RatFn<T>| match g.as_constant() {
        Some(c) => RatFn::constant(c * r.clone() + b.clone()),
        None => &g.scale(r) + &RatFn::constant(b.clone()),
    };
    Piece::new(f(&p.lo), p.lo_closed, f(&p.hi), p.hi_closed)
}

/// Partial values of a σ-family with the exact limit.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SigmaCertificate<T> {
    pub mode: SigmaMode,
    /// `(k, value)`: the measure of `F(k)` for monotone families, the partial
    /// sum up to `k` for disjoint ones.
    pub partial: Vec<(u64, T)>,
    /// The partial values as a sequence in `k`.
    pub closed_form: ExpSeq<T>,
    pub limit: T,
}

/// Checks the declared mode on `start..=depth`, computes the partial values
/// there, and reads the limit off their closed form.
pub fn sigma_limit<T: Scalar>(f: &SigmaFamily<T>, depth: u64) -> Result<SigmaCertificate<T>, LoebError> {
    if depth < f.start {
        return Err(LoebError::BadFamily(format!("depth {depth} is below the start index {}", f.start)));
    }
    f.check_mode(depth)?;
    let mut partial = f.measures(depth)?;
    let mut closed_form = f.closed_form()?;
    if f.mode == SigmaMode::Disjoint {
        closed_form = closed_form.partial_sums(f.start)?;
        let mut acc = T::zero();
        for (_, v) in partial.iter_mut() {
            acc = acc + v.clone();
            *v = acc.clone();
        }
    }
    for (k, v) in &partial {
        if closed_form.eval(*k).as_ref() != Some(v) {
            return Err(LoebError::ClosedFormMismatch(*k));
        }
    }
    let limit = match closed_form.limit() {
        ExtendedShadow::Finite(l) => l,
        _ => return Err(LoebError::InfiniteLimit),
    };
    Ok(SigmaCertificate { mode: f.mode, partial, closed_form, limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type S = ExpSeq<BigRational>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::from_frac(n, d)
    }

    #[test]
    fn increasing_union() {
        let lo = S::constant(q(1, 1)).checked_div(&S::k()).unwrap();
        let f = SigmaFamily::intervals(
            vec![KPiece::new(lo, true, S::constant(q(1, 1)), true)],
            SigmaMode::Increasing,
            1,
        );
        let cert = sigma_limit(&f, 30).unwrap();
        assert_eq!(cert.limit, q(1, 1));
        for (k, v) in &cert.partial {
            assert_eq!(*v, q(1, 1) - q(1, *k as i64));
        }
    }

    #[test]
    fn cantor_levels() {
        let cert = sigma_limit(&SigmaFamily::<BigRational>::cantor(), 40).unwrap();
        assert_eq!(cert.limit, q(0, 1));
        let mut expect = q(1, 1);
        for (k, v) in &cert.partial {
            assert_eq!(*v, expect, "level {k}");
            expect *= q(2, 3);
        }
        let level2 = SigmaFamily::<BigRational>::cantor().member(2).unwrap().unwrap();
        assert_eq!(level2.pieces().len(), 4);
    }

    #[test]
    fn dyadic_disjoint() {
        let half = q(1, 2);
        let f = SigmaFamily::intervals(
            vec![KPiece::new(
                S::exp_affine(&half, 1, 1).unwrap(),
                false,
                S::exp_affine(&half, 1, 0).unwrap(),
                true,
            )],
            SigmaMode::Disjoint,
            0,
        );
        let cert = sigma_limit(&f, 30).unwrap();
        assert_eq!(cert.limit, q(1, 1));
        let mut pow = q(1, 2);
        for (_, v) in &cert.partial {
            assert_eq!(*v, q(1, 1) - pow.clone());
            pow *= q(1, 2);
        }
    }

    #[test]
    fn wrong_mode_is_reported() {
        let lo = S::constant(q(1, 1)).checked_div(&S::k()).unwrap();
        let f = SigmaFamily::intervals(
            vec![KPiece::new(lo, true, S::constant(q(1, 1)), true)],
            SigmaMode::Decreasing,
            1,
        );
        assert!(matches!(sigma_limit(&f, 5), Err(LoebError::ModeViolation { k: 2, .. })));
        let f = SigmaFamily::intervals(
            vec![KPiece::new(S::zero(), true, S::constant(q(1, 2)), true)],
            SigmaMode::Disjoint,
            0,
        );
        assert!(matches!(sigma_limit(&f, 5), Err(LoebError::ModeViolation { k: 1, .. })));
    }

    #[test]
    fn clipped_endpoints_break_the_closed_form() {
        // [0, k] is clipped to [0, 1], so the width k is not the measure
        let f = SigmaFamily::intervals(
            vec![KPiece::new(S::zero(), true, S::k(), true)],
            SigmaMode::Increasing,
            1,
        );
        assert!(matches!(sigma_limit(&f, 5), Err(LoebError::ClosedFormMismatch(2))));
    }
}
