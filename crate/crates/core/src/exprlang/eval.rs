use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use thiserror::Error;

use super::ast::{BinOp, CmpOp, Expr, Func, SetAtom};
use crate::coding::{GermInterval, GermPredicate};
use crate::extnum::{extnum_add, extnum_mul, extnum_neg, ExternalNumber, Neutrix};
use crate::germfield::{BivariateGerm, ExpSeq, GermError, RatFn};
use crate::Q;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Germ(#[from] GermError),
    #[error("shadow of unlimited germ `{0}`")]
    Unlimited(String),
    #[error("`{0}` cannot be used here")]
    Misplaced(String),
    #[error("exponent `{0}` is not usable here")]
    BadExponent(String),
    #[error("division by an external number with a nonzero neutrix")]
    InexactDivisor,
}

type R<T> = Result<T, EvalError>;

fn literal(e: &Expr) -> Option<Q> {
    match e {
        Expr::Int(n) => Some(Q::from_integer(BigInt::from(n.clone()))),
        Expr::Decimal(a, b) => {
            let digits: BigUint = format!("{a}{b}").parse().expect("digits");
            let scale = num_traits::pow(BigUint::from(10u8), b.len());
            Some(Q::new(BigInt::from(digits), BigInt::from(scale)))
        }
        _ => None,
    }
}

fn int_exponent(e: &Expr) -> R<i64> {
    let (n, neg) = match e {
        Expr::Int(n) => (n, false),
        Expr::Neg(inner) => match &**inner {
            Expr::Int(n) => (n, true),
            _ => return Err(EvalError::BadExponent(e.to_string())),
        },
        _ => return Err(EvalError::BadExponent(e.to_string())),
    };
    let v = n.to_i64().ok_or(GermError::ExponentTooLarge(i64::MAX))?;
    Ok(if neg { -v } else { v })
}

fn misplaced(e: &Expr) -> EvalError {
    EvalError::Misplaced(e.to_string())
}

/// A germ in `ω`.
pub fn to_germ(e: &Expr) -> R<RatFn<Q>> {
    if let Some(q) = literal(e) {
        return Ok(RatFn::constant(q));
    }
    Ok(match e {
        Expr::W => RatFn::omega(),
        Expr::Neg(a) => -to_germ(a)?,
        Expr::Binary(BinOp::Pow, a, b) => to_germ(a)?.powi(int_exponent(b)?)?,
        Expr::Binary(op, a, b) => {
            let (x, y) = (to_germ(a)?, to_germ(b)?);
            match op {
                BinOp::Add => &x + &y,
                BinOp::Sub => &x - &y,
                BinOp::Mul => &x * &y,
                _ => x.checked_div(&y)?,
            }
        }
        Expr::Call(Func::Shadow, a) => {
            let g = to_germ(a)?;
            RatFn::constant(g.standard_part().ok_or_else(|| EvalError::Unlimited(g.to_string()))?)
        }
        _ => return Err(misplaced(e)),
    })
}

/// A condition on germs.
pub fn to_bool(e: &Expr) -> R<bool> {
    Ok(match e {
        Expr::Compare(op, a, b) => {
            let ord = to_germ(a)?.compare(&to_germ(b)?);
            match op {
                CmpOp::Lt => ord.is_lt(),
                CmpOp::Le => ord.is_le(),
                CmpOp::Gt => ord.is_gt(),
                CmpOp::Ge => ord.is_ge(),
                CmpOp::Eq => ord.is_eq(),
                CmpOp::Ne => ord.is_ne(),
            }
        }
        Expr::In(a, s) => to_predicate(s)?.holds(&to_germ(a)?),
        Expr::Call(f @ (Func::Limited | Func::Inf | Func::Std), a) => {
            let c = to_germ(a)?.classify();
            match f {
                Func::Limited => c.is_limited(),
                Func::Inf => c.is_infinitesimal(),
                _ => c.is_standard(),
            }
        }
        Expr::Not(a) => !to_bool(a)?,
        Expr::And(a, b) => to_bool(a)? && to_bool(b)?,
        Expr::Or(a, b) => to_bool(a)? || to_bool(b)?,
        _ => return Err(misplaced(e)),
    })
}

/// The predicate denoted by a set expression.
pub fn to_predicate(e: &Expr) -> R<GermPredicate<Q>> {
    Ok(match e {
        Expr::Interval { lo, lo_closed, hi, hi_closed } => {
            GermPredicate::Interval(GermInterval::new(to_germ(lo)?, *lo_closed, to_germ(hi)?, *hi_closed))
        }
        Expr::Singleton(a) => {
            let g = to_germ(a)?;
            GermPredicate::Interval(GermInterval::closed(g.clone(), g))
        }
        Expr::Set(atom) => match atom {
            SetAtom::Limited => GermPredicate::Limited,
            SetAtom::Inf => GermPredicate::Infinitesimal,
            SetAtom::Std => GermPredicate::Standard,
            SetAtom::Empty => GermPredicate::Empty,
            SetAtom::All => GermPredicate::All,
        },
        Expr::Not(a) => !to_predicate(a)?,
        Expr::And(a, b) => to_predicate(a)?.and(to_predicate(b)?),
        Expr::Or(a, b) => to_predicate(a)?.or(to_predicate(b)?),
        _ => return Err(misplaced(e)),
    })
}

/// An external number under Minkowski arithmetic.
pub fn to_ext(e: &Expr) -> R<ExternalNumber<Q>> {
    if let Some(q) = literal(e) {
        return Ok(ExternalNumber::exact(RatFn::constant(q)));
    }
    Ok(match e {
        Expr::W => ExternalNumber::exact(RatFn::omega()),
        Expr::Neutrix(n) => ExternalNumber::new(RatFn::zero(), *n),
        Expr::Neg(a) => extnum_neg(&to_ext(a)?),
        Expr::Binary(BinOp::Add, a, b) => extnum_add(&to_ext(a)?, &to_ext(b)?),
        Expr::Binary(BinOp::Sub, a, b) => extnum_add(&to_ext(a)?, &extnum_neg(&to_ext(b)?)),
        Expr::Binary(BinOp::Mul, a, b) => extnum_mul(&to_ext(a)?, &to_ext(b)?),
        Expr::Binary(BinOp::Div, a, b) => extnum_mul(&to_ext(a)?, &exact_inverse(&to_ext(b)?)?),
        Expr::Binary(BinOp::Pow, a, b) => {
            let n = int_exponent(b)?;
            let mut base = to_ext(a)?;
            if n < 0 {
                base = exact_inverse(&base)?;
            }
            if n.unsigned_abs() > crate::germfield::MAX_EXPONENT as u64 {
                return Err(GermError::ExponentTooLarge(n).into());
            }
            let mut acc = ExternalNumber::exact(RatFn::one());
            for _ in 0..n.unsigned_abs() {
                acc = extnum_mul(&acc, &base);
            }
            acc
        }
        _ => return Err(misplaced(e)),
    })
}

fn exact_inverse(x: &ExternalNumber<Q>) -> R<ExternalNumber<Q>> {
    if x.neutrix() != Neutrix::Zero {
        return Err(EvalError::InexactDivisor);
    }
    Ok(ExternalNumber::exact(x.center().recip()?))
}

/// A standard sequence in `k`. Besides integer powers, `b^(s·k + t)` is
/// accepted for a positive constant `b` and integers `s`, `t`.
pub fn to_kseq(e: &Expr) -> R<ExpSeq<Q>> {
    if let Some(q) = literal(e) {
        return Ok(ExpSeq::constant(q));
    }
    Ok(match e {
        Expr::K => ExpSeq::k(),
        Expr::Neg(a) => -&to_kseq(a)?,
        Expr::Binary(BinOp::Pow, a, b) => {
            let base = to_kseq(a)?;
            if let Ok(n) = int_exponent(b) {
                return Ok(base.powi(n)?);
            }
            let bad = || EvalError::BadExponent(b.to_string());
            let b0 = base.as_constant().ok_or_else(bad)?;
            let affine = to_kseq(b)?.as_ratfn().filter(|r| r.is_polynomial()).ok_or_else(bad)?;
            let p = affine.numer();
            if p.degree().unwrap_or(0) > 1 || !p.coeffs().iter().all(|c| c.is_integer()) {
                return Err(bad());
            }
            let slope = p.coeff(1).to_integer().to_i64().ok_or_else(bad)?;
            let offset = p.coeff(0).to_integer().to_i64().ok_or_else(bad)?;
            ExpSeq::exp_affine(&b0, slope, offset)?
        }
        Expr::Binary(op, a, b) => {
            let (x, y) = (to_kseq(a)?, to_kseq(b)?);
            match op {
                BinOp::Add => &x + &y,
                BinOp::Sub => &x - &y,
                BinOp::Mul => &x * &y,
                _ => x.checked_div(&y)?,
            }
        }
        _ => return Err(misplaced(e)),
    })
}

/// A family `F(k, ω)` of germs indexed by a standard `k`.
pub fn to_bivariate(e: &Expr) -> R<BivariateGerm<Q>> {
    if let Some(q) = literal(e) {
        return Ok(BivariateGerm::constant(q));
    }
    Ok(match e {
        Expr::K => BivariateGerm::k(),
        Expr::W => BivariateGerm::omega(),
        Expr::Neg(a) => -&to_bivariate(a)?,
        Expr::Binary(BinOp::Pow, a, b) => to_bivariate(a)?.powi(int_exponent(b)?)?,
        Expr::Binary(op, a, b) => {
            let (x, y) = (to_bivariate(a)?, to_bivariate(b)?);
            match op {
                BinOp::Add => &x + &y,
                BinOp::Sub => &x - &y,
                BinOp::Mul => &x * &y,
                _ => x.checked_div(&y)?,
            }
        }
        _ => return Err(misplaced(e)),
    })
}
