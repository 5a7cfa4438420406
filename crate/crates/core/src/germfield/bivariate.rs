//! Families of germs indexed by a standard integer `k`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::germ::RatFn;
use super::poly::Poly;
use super::GermError;
use crate::scalar::Scalar;

/// Polynomial in `(k, ω)`, keyed by `(deg_k, deg_ω)`; zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct BiPoly<T> {
    terms: BTreeMap<(u32, u32), T>,
}

impl<T: Scalar> BiPoly<T> {
    pub fn zero() -> Self {
        BiPoly { terms: BTreeMap::new() }
    }

    pub fn term(c: T, k_deg: u32, w_deg: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((k_deg, w_deg), c);
        }
        BiPoly { terms }
    }

    pub fn constant(c: T) -> Self {
        Self::term(c, 0, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn insert_add(&mut self, key: (u32, u32), c: T) {
        let slot = self.terms.entry(key).or_insert_with(T::zero);
        *slot = slot.clone() + c;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Fixes `k` at a concrete value, leaving a polynomial in ω.
    pub fn at_k(&self, k: &T) -> Poly<T> {
        let max_w = self.terms.keys().map(|&(_, j)| j as usize).max().unwrap_or(0);
        let mut coeffs = vec![T::zero(); max_w + 1];
        for (&(i, j), c) in &self.terms {
            coeffs[j as usize] = coeffs[j as usize].clone() + c.clone() * pow(k, i);
        }
        Poly::new(coeffs)
    }

    /// Substitutes `k := ω`.
    pub fn diagonal(&self) -> Poly<T> {
        let max_deg = self.terms.keys().map(|&(i, j)| (i + j) as usize).max().unwrap_or(0);
        let mut coeffs = vec![T::zero(); max_deg + 1];
        for (&(i, j), c) in &self.terms {
            let d = (i + j) as usize;
            coeffs[d] = coeffs[d].clone() + c.clone();
        }
        Poly::new(coeffs)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(T::one()), |acc, _| &acc * self)
    }
}

fn pow<T: Scalar>(base: &T, e: u32) -> T {
    (0..e).fold(T::one(), |acc, _| acc * base.clone())
}

impl<T: Scalar> Add for &BiPoly<T> {
    type Output = BiPoly<T>;
    fn add(self, rhs: &BiPoly<T>) -> BiPoly<T> {
        let mut out = self.clone();
        for (&k, c) in &rhs.terms {
            out.insert_add(k, c.clone());
        }
        out
    }
}

impl<T: Scalar> Neg for &BiPoly<T> {
    type Output = BiPoly<T>;
    fn neg(self) -> BiPoly<T> {
        BiPoly {
            terms: self.terms.iter().map(|(&k, c)| (k, -c.clone())).collect(),
        }
    }
}

impl<T: Scalar> Mul for &BiPoly<T> {
    type Output = BiPoly<T>;
    fn mul(self, rhs: &BiPoly<T>) -> BiPoly<T> {
        let mut out = BiPoly::zero();
        for (&(a, b), c) in &self.terms {
            for (&(x, y), d) in &rhs.terms {
                out.insert_add((a + x, b + y), c.clone() * d.clone());
            }
        }
        out
    }
}

/// A `k`-indexed family `F(k, ω) = num(k, ω) / den(k, ω)`.
///
/// Unlike [`RatFn`] this is not reduced; only its instances and its diagonal
/// are canonical germs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BivariateGerm<T> {
    num: BiPoly<T>,
    den: BiPoly<T>,
}

impl<T: Scalar> BivariateGerm<T> {
    pub fn new(num: BiPoly<T>, den: BiPoly<T>) -> Result<Self, GermError> {
        if den.is_zero() {
            return Err(GermError::DivisionByZero);
        }
        Ok(BivariateGerm { num, den })
    }

    pub fn constant(c: T) -> Self {
        BivariateGerm {
            num: BiPoly::constant(c),
            den: BiPoly::constant(T::one()),
        }
    }

    pub fn k() -> Self {
        BivariateGerm {
            num: BiPoly::term(T::one(), 1, 0),
            den: BiPoly::constant(T::one()),
        }
    }

    pub fn omega() -> Self {
        BivariateGerm {
            num: BiPoly::term(T::one(), 0, 1),
            den: BiPoly::constant(T::one()),
        }
    }

    pub fn from_germ(g: &RatFn<T>) -> Self {
        let lift = |p: &Poly<T>| {
            p.coeffs()
                .iter()
                .enumerate()
                .fold(BiPoly::zero(), |acc, (j, c)| &acc + &BiPoly::term(c.clone(), 0, j as u32))
        };
        BivariateGerm {
            num: lift(g.numer()),
            den: lift(g.denom()),
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, GermError> {
        Self::new(&self.num * &rhs.den, &self.den * &rhs.num)
    }

    pub fn powi(&self, e: i64) -> Result<Self, GermError> {
        let mag = u32::try_from(e.unsigned_abs()).map_err(|_| GermError::ExponentTooLarge(e))?;
        if mag > super::MAX_EXPONENT {
            return Err(GermError::ExponentTooLarge(e));
        }
        let (n, d) = (self.num.pow(mag), self.den.pow(mag));
        if e >= 0 {
            Self::new(n, d)
        } else {
            Self::new(d, n)
        }
    }

    /// `F(k, ·)` for a fixed standard `k`.
    pub fn instantiate(&self, k: u64) -> Result<RatFn<T>, GermError> {
        let kk = T::from_i64(k as i64);
        RatFn::from_parts(self.num.at_k(&kk), self.den.at_k(&kk))
            .map_err(|_| GermError::InvalidInstance(k))
    }

    /// `F(ω, ω)`, the idealized witness of the family.
    pub fn diagonal(&self) -> Result<RatFn<T>, GermError> {
        RatFn::from_parts(self.num.diagonal(), self.den.diagonal())
            .map_err(|_| GermError::DegenerateDiagonal)
    }
}

impl<T: Scalar> Add for &BivariateGerm<T> {
    type Output = BivariateGerm<T>;
    fn add(self, rhs: &BivariateGerm<T>) -> BivariateGerm<T> {
        BivariateGerm {
            num: &(&self.num * &rhs.den) + &(&rhs.num * &self.den),
            den: &self.den * &rhs.den,
        }
    }
}

impl<T: Scalar> Sub for &BivariateGerm<T> {
    type Output = BivariateGerm<T>;
    fn sub(self, rhs: &BivariateGerm<T>) -> BivariateGerm<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &BivariateGerm<T> {
    type Output = BivariateGerm<T>;
    fn mul(self, rhs: &BivariateGerm<T>) -> BivariateGerm<T> {
        BivariateGerm {
            num: &self.num * &rhs.num,
            den: &self.den * &rhs.den,
        }
    }
}

impl<T: Scalar> Neg for &BivariateGerm<T> {
    type Output = BivariateGerm<T>;
    fn neg(self) -> BivariateGerm<T> {
        BivariateGerm {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl<T: Scalar> fmt::Display for BiPoly<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().rev().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            if i > 0 {
                write!(f, "*k^{i}")?;
            }
            if j > 0 {
                write!(f, "*w^{j}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type B = BivariateGerm<BigRational>;
    type G = RatFn<BigRational>;

    fn one() -> B {
        B::constant(BigRational::from_i64(1))
    }

    #[test]
    fn diagonal_of_k_over_k_plus_one() {
        let f = B::k().checked_div(&(&B::k() + &one())).unwrap();
        let expect = G::omega().checked_div(&(&G::omega() + &G::one())).unwrap();
        assert_eq!(f.diagonal().unwrap(), expect);
    }

    #[test]
    fn diagonal_with_omega_term_has_shadow_one() {
        let f = &B::k().checked_div(&(&B::k() + &one())).unwrap()
            + &one().checked_div(&B::omega()).unwrap();
        let d = f.diagonal().unwrap();
        let expect = &G::omega().checked_div(&(&G::omega() + &G::one())).unwrap()
            + &G::omega().recip().unwrap();
        assert_eq!(d, expect);
        assert_eq!(d.standard_part(), Some(BigRational::from_i64(1)));
    }

    #[test]
    fn diagonal_of_reciprocal_product() {
        let f = one().checked_div(&(&B::k() * &B::omega())).unwrap();
        assert_eq!(f.diagonal().unwrap(), G::omega_pow(-2));
    }

    #[test]
    fn degenerate_diagonal() {
        // den = k - ω vanishes identically on the diagonal
        let f = one().checked_div(&(&B::k() - &B::omega())).unwrap();
        assert_eq!(f.diagonal(), Err(GermError::DegenerateDiagonal));
        assert!(f.instantiate(3).is_ok());
    }

    #[test]
    fn instance_at_pole_rejected() {
        let f = one().checked_div(&B::k()).unwrap();
        assert_eq!(f.instantiate(0), Err(GermError::InvalidInstance(0)));
        assert_eq!(f.instantiate(4).unwrap(), G::constant(BigRational::from_frac(1, 4)));
    }
}
