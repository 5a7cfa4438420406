//! Plain-text σ-family schemas.
//!
//! ```text
//! # dyadic pieces
//! mode: disjoint
//! start: 0
//! depth: 30
//! interval: (2^(-k - 1), 2^-k]
//! ```
//!
//! `interval:` may repeat; `generator: cantor` replaces the interval lines.

use super::ast::Expr;
use super::eval::to_kseq;
use super::{parse, Mode, ParseError, ParseErrorKind};
use crate::loeb::{KPiece, SigmaFamily, SigmaMode};
use crate::Q;

#[derive(Clone, Debug)]
pub struct SigmaSchema {
    pub family: SigmaFamily<Q>,
    pub depth: Option<u64>,
}

fn at(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError { line, col, kind: ParseErrorKind::Syntax(msg.into()) }
}

fn pieces(e: &Expr, line: usize, col: usize, out: &mut Vec<KPiece<Q>>) -> Result<(), ParseError> {
    let seq = |x: &Expr| to_kseq(x).map_err(|err| at(line, col, err.to_string()));
    match e {
        Expr::Interval { lo, lo_closed, hi, hi_closed } => {
            out.push(KPiece::new(seq(lo)?, *lo_closed, seq(hi)?, *hi_closed));
        }
        Expr::Singleton(a) => {
            let s = seq(a)?;
            out.push(KPiece::new(s.clone(), true, s, true));
        }
        Expr::Or(a, b) => {
            pieces(a, line, col, out)?;
            pieces(b, line, col, out)?;
        }
        _ => return Err(at(line, col, "expected intervals joined by `|`")),
    }
    Ok(())
}

pub fn parse_sigma(text: &str) -> Result<SigmaSchema, ParseError> {
    let mut mode = None;
    let mut start = None;
    let mut depth = None;
    let mut cantor = false;
    let mut ks: Vec<KPiece<Q>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once(':') else {
            return Err(at(line, 1, "expected `key: value`"));
        };
        let col = key.chars().count() + 2 + (value.len() - value.trim_start().len());
        let value = value.trim();
        let number = |v: &str| v.parse::<u64>().map_err(|_| at(line, col, format!("`{v}` is not a count")));
        match key.trim() {
            "mode" => {
                mode = Some(match value {
                    "increasing" => SigmaMode::Increasing,
                    "decreasing" => SigmaMode::Decreasing,
                    "disjoint" => SigmaMode::Disjoint,
                    _ => return Err(at(line, col, format!("unknown mode `{value}`"))),
                })
            }
            "start" => start = Some(number(value)?),
            "depth" => depth = Some(number(value)?),
            "generator" if value == "cantor" => cantor = true,
            "generator" => return Err(at(line, col, format!("unknown generator `{value}`"))),
            "interval" => {
                let e = parse(value, Mode::Family).map_err(|mut err| {
                    err.col += col - 1;
                    err.line = line;
                    err
                })?;
                pieces(&e, line, col, &mut ks)?;
            }
            other => return Err(at(line, 1, format!("unknown key `{other}`"))),
        }
    }
    let family = match (cantor, ks.is_empty()) {
        (true, true) => {
            let mut f = SigmaFamily::cantor();
            if let Some(m) = mode {
                f.mode = m;
            }
            if let Some(s) = start {
                f.start = s;
            }
            f
        }
        (false, false) => {
            let m = mode.ok_or_else(|| at(1, 1, "missing `mode`"))?;
            SigmaFamily::intervals(ks, m, start.unwrap_or(0))
        }
        (true, false) => return Err(at(1, 1, "use either `generator` or `interval` lines")),
        (false, true) => return Err(at(1, 1, "no intervals given")),
    };
    Ok(SigmaSchema { family, depth })
}
