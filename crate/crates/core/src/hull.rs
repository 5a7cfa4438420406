//! Nonstandard hulls of a few built-in standard metric spaces.
//!
//! A hull point is a finite point up to infinitesimal distance. Each class is
//! represented by a canonical germ, so equality of hull points is structural.

use std::fmt;

use thiserror::Error;

use crate::germfield::{BivariateGerm, ExtendedShadow, GermError, RatFn};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HullError {
    #[error("`{0}` is not a finite point")]
    NotFinite(String),
    #[error("points live in different structures: {0} vs {1}")]
    StructureMismatch(StdMetricStructure, StdMetricStructure),
    #[error("`{0}` is not a point of {1}")]
    NotInStructure(String, StdMetricStructure),
    #[error("Cauchy certificate fails at j = {j}: indices {k} and {l} are {dist} apart")]
    ModulusViolation { j: u64, k: u64, l: u64, dist: String },
    #[error("limit is {dist} from term {k}, more than 1/{den}")]
    LimitViolation { k: u64, den: u64, dist: String },
    #[error("invalid modulus: {0}")]
    BadModulus(String),
    #[error(transparent)]
    Germ(#[from] GermError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StdMetricStructure {
    /// `ℚ` with `|x - y|`.
    RationalsAbs,
    /// `ℕ` with the metric that is `1` between distinct points.
    NaturalsDiscrete,
    /// `ℚ^d` with the max metric.
    RationalsVector(usize),
}

impl StdMetricStructure {
    pub fn dimension(self) -> usize {
        match self {
            StdMetricStructure::RationalsVector(d) => d,
            _ => 1,
        }
    }

    /// Germ distance between two points of matching dimension.
    pub fn distance<T: Scalar>(self, x: &[RatFn<T>], y: &[RatFn<T>]) -> RatFn<T> {
        match self {
            StdMetricStructure::NaturalsDiscrete => {
                if x == y {
                    RatFn::zero()
                } else {
                    RatFn::one()
                }
            }
            _ => x
                .iter()
                .zip(y)
                .map(|(a, b)| (a - b).abs())
                .fold(RatFn::zero(), RatFn::max),
        }
    }

    fn admits<T: Scalar>(self, x: &[RatFn<T>]) -> bool {
        if x.len() != self.dimension() {
            return false;
        }
        match self {
            StdMetricStructure::NaturalsDiscrete => {
                let g = &x[0];
                g.is_polynomial()
                    && g.numer().is_integer_valued()
                    && g.signum() != std::cmp::Ordering::Less
                    && g.eventually_threshold().map_or(true, |n0| {
                        (0..n0.min(4096)).all(|n| g.eval_u64(n).is_some_and(|v| !v.is_negative()))
                    })
            }
            _ => true,
        }
    }
}

impl fmt::Display for StdMetricStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StdMetricStructure::RationalsAbs => write!(f, "rationals-abs"),
            StdMetricStructure::NaturalsDiscrete => write!(f, "naturals-discrete"),
            StdMetricStructure::RationalsVector(d) => write!(f, "rationals-vector({d})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HullPoint<T> {
    pub structure: StdMetricStructure,
    pub representative: Vec<RatFn<T>>,
    pub canonical: Vec<RatFn<T>>,
}

fn show<T: Scalar>(v: &[RatFn<T>]) -> String {
    if v.len() == 1 {
        return v[0].to_string();
    }
    let parts: Vec<String> = v.iter().map(|g| g.to_string()).collect();
    format!("({})", parts.join(", "))
}

impl<T: Scalar> HullPoint<T> {
    /// Componentwise sum, for vector hulls.
    pub fn add(&self, other: &Self) -> Result<Self, HullError> {
        same(self, other)?;
        let v: Vec<RatFn<T>> =
            self.representative.iter().zip(&other.representative).map(|(a, b)| a + b).collect();
        hull_point(self.structure, &v)
    }

    /// Multiplication by a standard scalar.
    pub fn scale(&self, q: &T) -> Result<Self, HullError> {
        let v: Vec<RatFn<T>> = self.representative.iter().map(|a| a.scale(q)).collect();
        hull_point(self.structure, &v)
    }

    /// Standard values of the canonical form, when it is standard.
    pub fn standard_coords(&self) -> Option<Vec<T>> {
        self.canonical.iter().map(|g| g.as_constant()).collect()
    }
}

impl<T: Scalar> fmt::Display for HullPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", show(&self.canonical))
    }
}

fn same<T>(p: &HullPoint<T>, q: &HullPoint<T>) -> Result<(), HullError> {
    if p.structure != q.structure {
        return Err(HullError::StructureMismatch(p.structure, q.structure));
    }
    Ok(())
}

pub fn hull_point<T: Scalar>(s: StdMetricStructure, g: &[RatFn<T>]) -> Result<HullPoint<T>, HullError> {
    if !s.admits(g) {
        return Err(HullError::NotInStructure(show(g), s));
    }
    let canonical = match s {
        StdMetricStructure::NaturalsDiscrete => g.to_vec(),
        _ => g
            .iter()
            .map(|x| match x.shadow() {
                ExtendedShadow::Finite(c) => Ok(RatFn::constant(c)),
                _ => Err(HullError::NotFinite(show(g))),
            })
            .collect::<Result<_, _>>()?,
    };
    Ok(HullPoint { structure: s, representative: g.to_vec(), canonical })
}

pub fn hull_dist<T: Scalar>(p: &HullPoint<T>, q: &HullPoint<T>) -> Result<T, HullError> {
    same(p, q)?;
    let d = p.structure.distance(&p.representative, &q.representative);
    // both points are finite, so their distance is limited
    Ok(d.standard_part().expect("distance of finite points is limited"))
}

/// Whether every standard tolerance is met by some standard point.
pub fn approachable<T: Scalar>(s: StdMetricStructure, g: &[RatFn<T>]) -> bool {
    if !s.admits(g) {
        return false;
    }
    match s {
        StdMetricStructure::NaturalsDiscrete => g[0].is_constant(),
        _ => g.iter().all(|x| x.is_limited()),
    }
}

/// A point of the hull of `ℚ^d` under the max norm.
pub fn normed_hull<T: Scalar>(d: usize, v: &[RatFn<T>]) -> Result<HullPoint<T>, HullError> {
    if v.len() != d {
        return Err(HullError::NotInStructure(show(v), StdMetricStructure::RationalsVector(d)));
    }
    hull_point(StdMetricStructure::RationalsVector(d), v)
}

/// A standard sequence of points `F(k)` together with a Cauchy modulus
/// `m(j) = slope·j + offset`: past `m(j)` all terms are within `1/(j+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullSequence<T> {
    pub structure: StdMetricStructure,
    pub family: Vec<BivariateGerm<T>>,
    pub slope: u64,
    pub offset: u64,
    pub start: u64,
}

/// Tolerance exponents `j = 0..=DEFAULT_CHECKS` are sampled.
pub const DEFAULT_CHECKS: u64 = 20;

impl<T: Scalar> HullSequence<T> {
    pub fn scalar(family: BivariateGerm<T>, slope: u64, offset: u64, start: u64) -> Self {
        HullSequence { structure: StdMetricStructure::RationalsAbs, family: vec![family], slope, offset, start }
    }

    pub fn modulus(&self, j: u64) -> u64 {
        (self.slope * j + self.offset).max(self.start)
    }

    pub fn term(&self, k: u64) -> Result<HullPoint<T>, HullError> {
        let v: Vec<RatFn<T>> = self.family.iter().map(|f| f.instantiate(k)).collect::<Result<_, _>>()?;
        hull_point(self.structure, &v)
    }

    fn samples(&self, j: u64) -> Vec<u64> {
        let m = self.modulus(j);
        let mut ks = vec![m, m + 1, m + 2, m + 7, 2 * m + 1, 3 * m + 5, 10 * m + 3];
        ks.dedup();
        ks
    }
}

/// Certificate returned with a completeness limit.
#[derive(Debug, Clone)]
pub struct HullLimit<T> {
    pub point: HullPoint<T>,
    /// `(j, k, dist(limit, F(k)))` for every sampled pair.
    pub checks: Vec<(u64, u64, T)>,
}

/// The limit of a standard Cauchy sequence, taken at the diagonal `F(ω, ω)`.
///
/// The Cauchy certificate is sampled for `j ≤ checks` before the diagonal is
/// formed; afterwards every sampled term past `m(j)` must lie within
/// `1/(j+1)` of the limit.
pub fn hull_limit<T: Scalar>(seq: &HullSequence<T>, checks: u64) -> Result<HullLimit<T>, HullError> {
    if seq.family.len() != seq.structure.dimension() {
        return Err(HullError::BadModulus(format!(
            "family has {} components for {}",
            seq.family.len(),
            seq.structure
        )));
    }
    if seq.slope == 0 && checks > 0 {
        return Err(HullError::BadModulus("modulus must grow with j".into()));
    }
    let tol = |j: u64| T::from_frac(1, j as i64 + 1);
    for j in 0..=checks {
        let ks = seq.samples(j);
        let pts: Vec<HullPoint<T>> = ks.iter().map(|&k| seq.term(k)).collect::<Result<_, _>>()?;
        for (a, pa) in ks.iter().zip(&pts) {
            for (b, pb) in ks.iter().zip(&pts) {
                let d = hull_dist(pa, pb)?;
                if d >= tol(j) {
                    return Err(HullError::ModulusViolation { j, k: *a, l: *b, dist: d.to_string() });
                }
            }
        }
    }
    let diag: Vec<RatFn<T>> = seq.family.iter().map(|f| f.diagonal()).collect::<Result<_, _>>()?;
    let point = hull_point(seq.structure, &diag)?;
    let mut out = Vec::new();
    for j in 0..=checks {
        for k in seq.samples(j) {
            let d = hull_dist(&point, &seq.term(k)?)?;
            if d > tol(j) {
                return Err(HullError::LimitViolation { k, den: j + 1, dist: d.to_string() });
            }
            out.push((j, k, d));
        }
    }
    Ok(HullLimit { point, checks: out })
}
