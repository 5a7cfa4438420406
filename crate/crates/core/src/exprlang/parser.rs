use num_bigint::BigUint;

use super::ast::{BinOp, CmpOp, Expr, Func, SetAtom};
use super::{Mode, ParseError, ParseErrorKind};
use crate::extnum::Neutrix;

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Int(String),
    Dec(String, String),
    Ident(String),
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 21] = [
    "<=", ">=", "!=", "+", "-", "*", "/", "^", "(", ")", "[", "]", "{", "}", ",", "~", "&", "|", "<", ">", "=",
];

fn lex(input: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = input.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: String| ParseError { line, col, kind: ParseErrorKind::Syntax(msg) };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let start = i;
        let tok = if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let whole: String = chars[start..i].iter().collect();
            if i < chars.len() && chars[i] == '.' {
                i += 1;
                let fs = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                if fs == i {
                    return Err(err(l0, c0 + (i - start), "expected digits after the decimal point".into()));
                }
                Tok::Dec(whole, chars[fs..i].iter().collect())
            } else {
                Tok::Int(whole)
            }
        } else if c.is_ascii_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            Tok::Ident(chars[start..i].iter().collect())
        } else {
            let rest: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    i += s.len();
                    Tok::Sym(s)
                }
                None => return Err(err(l0, c0, format!("unexpected character `{c}`"))),
            }
        };
        col += i - start;
        out.push(Token { tok, line: l0, col: c0 });
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

/// What an expression denotes.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(super) enum Sort {
    Num,
    Bool,
    Set,
}

impl Sort {
    fn name(self) -> &'static str {
        match self {
            Sort::Num => "a number",
            Sort::Bool => "a condition",
            Sort::Set => "a set",
        }
    }
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    mode: Mode,
}

type PResult = Result<(Expr, Sort), ParseError>;

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(x) if x == s)
    }

    fn fail<T>(&self, t: &Token, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError { line: t.line, col: t.col, kind })
    }

    fn syntax<T>(&self, t: &Token, msg: impl Into<String>) -> Result<T, ParseError> {
        self.fail(t, ParseErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, s: &'static str) -> Result<(), ParseError> {
        if self.is_sym(s) {
            self.bump();
            Ok(())
        } else {
            let t = self.peek().clone();
            self.syntax(&t, format!("expected `{s}`, found {}", describe(&t.tok)))
        }
    }

    fn want(&self, t: &Token, got: Sort, want: &[Sort], what: &str) -> Result<(), ParseError> {
        if want.contains(&got) {
            Ok(())
        } else {
            let names: Vec<&str> = want.iter().map(|s| s.name()).collect();
            self.fail(
                t,
                ParseErrorKind::Sort(format!("{what} needs {}, found {}", names.join(" or "), got.name())),
            )
        }
    }

    fn expr(&mut self) -> PResult {
        self.or()
    }

    fn logical(&mut self, sym: &'static str, next: fn(&mut Self) -> PResult, make: fn(Box<Expr>, Box<Expr>) -> Expr) -> PResult {
        let (mut l, ls) = next(self)?;
        while self.is_sym(sym) {
            let t = self.bump();
            self.want(&t, ls, &[Sort::Bool, Sort::Set], &format!("`{sym}`"))?;
            let (r, rs) = next(self)?;
            self.want(&t, rs, &[ls], &format!("right side of `{sym}`"))?;
            l = make(Box::new(l), Box::new(r));
        }
        Ok((l, ls))
    }

    fn or(&mut self) -> PResult {
        self.logical("|", Self::and, Expr::Or)
    }

    fn and(&mut self) -> PResult {
        self.logical("&", Self::not, Expr::And)
    }

    fn not(&mut self) -> PResult {
        if self.is_sym("~") {
            let t = self.bump();
            let (e, s) = self.not()?;
            self.want(&t, s, &[Sort::Bool, Sort::Set], "`~`")?;
            return Ok((Expr::Not(Box::new(e)), s));
        }
        self.compare()
    }

    fn compare(&mut self) -> PResult {
        let (l, ls) = self.arith()?;
        let op = match &self.peek().tok {
            Tok::Sym(s) => CmpOp::ALL.into_iter().find(|op| op.symbol() == *s),
            _ => None,
        };
        if let Some(op) = op {
            let t = self.bump();
            self.want(&t, ls, &[Sort::Num], "comparison")?;
            let (r, rs) = self.arith()?;
            self.want(&t, rs, &[Sort::Num], "comparison")?;
            return Ok((Expr::Compare(op, Box::new(l), Box::new(r)), Sort::Bool));
        }
        if self.is_ident("in") {
            let t = self.bump();
            self.want(&t, ls, &[Sort::Num], "left side of `in`")?;
            let (r, rs) = self.arith()?;
            self.want(&t, rs, &[Sort::Set], "right side of `in`")?;
            return Ok((Expr::In(Box::new(l), Box::new(r)), Sort::Bool));
        }
        Ok((l, ls))
    }

    fn arith(&mut self) -> PResult {
        let (mut l, ls) = self.term()?;
        loop {
            let op = if self.is_sym("+") {
                BinOp::Add
            } else if self.is_sym("-") {
                BinOp::Sub
            } else {
                return Ok((l, ls));
            };
            let t = self.bump();
            self.want(&t, ls, &[Sort::Num], "arithmetic")?;
            let (r, rs) = self.term()?;
            self.want(&t, rs, &[Sort::Num], "arithmetic")?;
            l = Expr::bin(op, l, r);
        }
    }

    fn term(&mut self) -> PResult {
        let (mut l, ls) = self.unary()?;
        loop {
            let op = if self.is_sym("*") {
                BinOp::Mul
            } else if self.is_sym("/") {
                BinOp::Div
            } else {
                return Ok((l, ls));
            };
            let t = self.bump();
            self.want(&t, ls, &[Sort::Num], "arithmetic")?;
            let rt = self.peek().clone();
            let (r, rs) = self.unary()?;
            self.want(&t, rs, &[Sort::Num], "arithmetic")?;
            if op == BinOp::Div && r.is_zero_literal() {
                return self.fail(&rt, ParseErrorKind::ZeroDenominator);
            }
            l = Expr::bin(op, l, r);
        }
    }

    fn unary(&mut self) -> PResult {
        if self.is_sym("-") {
            let t = self.bump();
            let (e, s) = self.unary()?;
            self.want(&t, s, &[Sort::Num], "unary minus")?;
            return Ok((-e, Sort::Num));
        }
        self.power()
    }

    fn power(&mut self) -> PResult {
        let (b, bs) = self.primary()?;
        if !self.is_sym("^") {
            return Ok((b, bs));
        }
        let t = self.bump();
        self.want(&t, bs, &[Sort::Num], "`^`")?;
        let et = self.peek().clone();
        let (e, es) = self.unary()?;
        self.want(&t, es, &[Sort::Num], "exponent")?;
        let literal = match &e {
            Expr::Int(_) => true,
            Expr::Neg(inner) => matches!(**inner, Expr::Int(_)),
            _ => false,
        };
        if !literal && self.mode != Mode::Family {
            return self.fail(&et, ParseErrorKind::Syntax("exponent must be an integer literal".into()));
        }
        Ok((Expr::bin(BinOp::Pow, b, e), Sort::Num))
    }

    fn num_arg(&mut self, what: &str) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        let (e, s) = self.expr()?;
        self.want(&t, s, &[Sort::Num], what)?;
        Ok(e)
    }

    fn primary(&mut self) -> PResult {
        let t = self.bump();
        match &t.tok {
            Tok::Int(d) => Ok((Expr::Int(d.parse::<BigUint>().expect("digits")), Sort::Num)),
            Tok::Dec(a, b) => Ok((Expr::Decimal(a.clone(), b.clone()), Sort::Num)),
            Tok::Ident(id) => self.ident(&t, id),
            Tok::Sym("(") => {
                let (e, s) = self.expr()?;
                if self.is_sym(",") {
                    self.want(&t, s, &[Sort::Num], "interval endpoint")?;
                    self.bump();
                    return self.interval_tail(e, false);
                }
                self.expect(")")?;
                Ok((e, s))
            }
            Tok::Sym("[") => {
                let lo = self.num_arg("interval endpoint")?;
                self.expect(",")?;
                self.interval_tail(lo, true)
            }
            Tok::Sym("{") => {
                let e = self.num_arg("singleton")?;
                self.expect("}")?;
                Ok((Expr::Singleton(Box::new(e)), Sort::Set))
            }
            other => self.syntax(&t, format!("expected an expression, found {}", describe(other))),
        }
    }

    fn interval_tail(&mut self, lo: Expr, lo_closed: bool) -> PResult {
        let hi = self.num_arg("interval endpoint")?;
        let hi_closed = if self.is_sym("]") {
            true
        } else if self.is_sym(")") {
            false
        } else {
            let t = self.peek().clone();
            return self.syntax(&t, format!("expected `]` or `)`, found {}", describe(&t.tok)));
        };
        self.bump();
        Ok((Expr::Interval { lo: Box::new(lo), lo_closed, hi: Box::new(hi), hi_closed }, Sort::Set))
    }

    fn ident(&mut self, t: &Token, id: &str) -> PResult {
        let call = |p: &mut Self, f: Func| -> PResult {
            p.expect("(")?;
            let e = p.num_arg(f.name())?;
            p.expect(")")?;
            let sort = if f == Func::Shadow { Sort::Num } else { Sort::Bool };
            Ok((Expr::Call(f, Box::new(e)), sort))
        };
        let predicate = |p: &mut Self, f: Func, atom: SetAtom| -> PResult {
            if p.is_sym("(") {
                call(p, f)
            } else {
                Ok((Expr::Set(atom), Sort::Set))
            }
        };
        match id {
            "w" => Ok((Expr::W, Sort::Num)),
            "k" if self.mode == Mode::Family => Ok((Expr::K, Sort::Num)),
            "k" => self.fail(t, ParseErrorKind::KOutsideFamily),
            "M0" | "G0" | "N" if self.mode != Mode::Ext => {
                self.syntax(t, format!("neutrix `{id}` is only allowed in external-number expressions"))
            }
            "M0" => Ok((Expr::Neutrix(Neutrix::M0), Sort::Num)),
            "G0" => Ok((Expr::Neutrix(Neutrix::G0), Sort::Num)),
            "N" => {
                self.expect("(")?;
                let neg = self.is_sym("-");
                if neg {
                    self.bump();
                }
                let nt = self.bump();
                let Tok::Int(d) = &nt.tok else {
                    return self.syntax(&nt, "expected an integer grade");
                };
                let k: i64 = match d.parse::<i64>() {
                    Ok(k) => k,
                    Err(_) => return self.syntax(&nt, "grade is too large"),
                };
                self.expect(")")?;
                Ok((Expr::Neutrix(Neutrix::Graded(if neg { -k } else { k })), Sort::Num))
            }
            "shadow" => call(self, Func::Shadow),
            "limited" => predicate(self, Func::Limited, SetAtom::Limited),
            "inf" => predicate(self, Func::Inf, SetAtom::Inf),
            "std" => predicate(self, Func::Std, SetAtom::Std),
            "empty" => Ok((Expr::Set(SetAtom::Empty), Sort::Set)),
            "all" => Ok((Expr::Set(SetAtom::All), Sort::Set)),
            _ => self.syntax(t, format!("unknown name `{id}`")),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(d) => format!("`{d}`"),
        Tok::Dec(a, b) => format!("`{a}.{b}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::Eof => "end of input".into(),
    }
}

pub(super) fn parse_sorted(input: &str, mode: Mode) -> Result<(Expr, Sort), ParseError> {
    let mut p = Parser { toks: lex(input)?, pos: 0, mode };
    let start = p.peek().clone();
    let (e, s) = p.expr()?;
    let t = p.peek().clone();
    if t.tok != Tok::Eof {
        return p.syntax(&t, format!("unexpected {}", describe(&t.tok)));
    }
    let allowed: &[Sort] = match mode {
        Mode::Germ => &[Sort::Num, Sort::Bool],
        Mode::Set => &[Sort::Set],
        Mode::Ext => &[Sort::Num],
        Mode::Family => &[Sort::Num, Sort::Set],
    };
    p.want(&start, s, allowed, &format!("{mode} mode"))?;
    Ok((e, s))
}
