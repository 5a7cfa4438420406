//! Text syntax shared by all parse modes.
//!
//! Precedence from loosest to tightest: `|`, `&`, `~`, comparisons and
//! `in`, `+ -`, `* /`, unary minus, `^`. The printer emits canonical spacing
//! and only the parentheses the grammar needs, so printing and reparsing
//! gives back the same tree. `docs/grammar.ebnf` has the full grammar.

mod ast;
mod eval;
mod parser;
mod schema;

use std::fmt;

use thiserror::Error;

pub use ast::{BinOp, CmpOp, Expr, Func, SetAtom};
pub use eval::{to_bivariate, to_bool, to_ext, to_germ, to_kseq, to_predicate, EvalError};
pub use schema::{parse_sigma, SigmaSchema};

/// Which expressions a parse accepts.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Mode {
    /// A germ in `w`, or a condition on germs.
    Germ,
    /// A set of germs.
    Set,
    /// An external number; neutrix literals `M0`, `G0`, `N(k)` are allowed.
    Ext,
    /// A family in `k` (and `w`), or a set with such endpoints; exponents
    /// may depend on `k`.
    Family,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Germ => "germ",
            Mode::Set => "set",
            Mode::Ext => "ext",
            Mode::Family => "family",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    Sort(String),
    ZeroDenominator,
    KOutsideFamily,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Syntax(m) | ParseErrorKind::Sort(m) => f.write_str(m),
            ParseErrorKind::ZeroDenominator => f.write_str("zero denominator"),
            ParseErrorKind::KOutsideFamily => f.write_str("`k` is only allowed in family expressions"),
        }
    }
}

/// What a parsed expression denotes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Kind {
    Value,
    Condition,
    Set,
}

pub fn parse(input: &str, mode: Mode) -> Result<Expr, ParseError> {
    parser::parse_sorted(input, mode).map(|(e, _)| e)
}

/// Like [`parse`], also reporting what the expression denotes.
pub fn parse_kind(input: &str, mode: Mode) -> Result<(Expr, Kind), ParseError> {
    let (e, s) = parser::parse_sorted(input, mode)?;
    let kind = match s {
        parser::Sort::Num => Kind::Value,
        parser::Sort::Bool => Kind::Condition,
        parser::Sort::Set => Kind::Set,
    };
    Ok((e, kind))
}
