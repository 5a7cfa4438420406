//! Finite ultrapowers by principal ultrafilters, checked by brute force.
//!
//! Over a finite index set every ultrafilter is principal, generated by the
//! distinguished point `w`. Bounded formulas are evaluated in the full quotient
//! of all maps `I → carrier` and compared against the ultrafilter largeness
//! of their pointwise truth sets.

mod formula;
mod quotient;
mod structure;
mod sweep;
mod ultrafilter;

use thiserror::Error;

pub use formula::{los_check, Formula, Interpretation, LosReport, Var};
pub use quotient::{setop_check, ultrapower_quotient, ClassId, FinUltrapower, FnId, SetopReport, MAX_FUNCTIONS};
pub use structure::{parse_model, FinStructure, ModelSpec};
pub use sweep::{check_model, sweep, syntactic_formula_count, Mismatch, SweepConfig, SweepReport, MAX_SWEEP_DOMAIN};
pub use ultrafilter::{build_ultrafilter, mask_to_vec, FinIndex, IndexSet, PrincipalUltrafilter, MAX_INDEX};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("index size {0} is outside 1..={max}", max = MAX_INDEX)]
    IndexSize(usize),
    #[error("distinguished point {w} is not in an index of size {size}")]
    PointOutsideIndex { w: usize, size: usize },
    #[error("carrier must be nonempty")]
    EmptyCarrier,
    #[error("element {0} is outside the carrier")]
    ElementOutOfRange(usize),
    #[error("{0} maps exceed the enumeration limit")]
    TooManyFunctions(u128),
    #[error("malformed formula: {0}")]
    Malformed(String),
    #[error("model file line {0}: {1}")]
    Syntax(usize, String),
    #[error("model file is missing `{0}`")]
    Missing(&'static str),
    #[error("sweep bounds: {0}")]
    SweepBounds(String),
}
