use std::fmt;

use num_bigint::BigUint;

use crate::extnum::Neutrix;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    pub const ALL: [CmpOp; 6] = [CmpOp::Lt, CmpOp::Le, CmpOp::Gt, CmpOp::Ge, CmpOp::Eq, CmpOp::Ne];

    pub fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "=",
            CmpOp::Ne => "!=",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Func {
    Shadow,
    Limited,
    Inf,
    Std,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Shadow => "shadow",
            Func::Limited => "limited",
            Func::Inf => "inf",
            Func::Std => "std",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum SetAtom {
    Limited,
    Inf,
    Std,
    Empty,
    All,
}

impl SetAtom {
    pub fn name(self) -> &'static str {
        match self {
            SetAtom::Limited => "limited",
            SetAtom::Inf => "inf",
            SetAtom::Std => "std",
            SetAtom::Empty => "empty",
            SetAtom::All => "all",
        }
    }
}

/// Syntax tree shared by every parsing mode.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Expr {
    Int(BigUint),
    /// Digits before and after the point, kept verbatim.
    Decimal(String, String),
    W,
    K,
    Neutrix(Neutrix),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Compare(CmpOp, Box<Expr>, Box<Expr>),
    In(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    Interval { lo: Box<Expr>, lo_closed: bool, hi: Box<Expr>, hi_closed: bool },
    Singleton(Box<Expr>),
    Set(SetAtom),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

impl std::ops::Neg for Expr {
    type Output = Expr;

    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

impl Expr {
    pub fn int(n: u64) -> Expr {
        Expr::Int(BigUint::from(n))
    }

    pub fn bin(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }

    /// Binding strength; higher binds tighter.
    fn level(&self) -> u8 {
        match self {
            Expr::Or(..) => 1,
            Expr::And(..) => 2,
            Expr::Not(_) => 3,
            Expr::Compare(..) | Expr::In(..) => 4,
            Expr::Binary(BinOp::Add | BinOp::Sub, ..) => 5,
            Expr::Binary(BinOp::Mul | BinOp::Div, ..) => 6,
            Expr::Neg(_) => 7,
            Expr::Binary(BinOp::Pow, ..) => 8,
            _ => 9,
        }
    }

    /// Whether this is a literal zero (`0`, `0.00`, ...).
    pub fn is_zero_literal(&self) -> bool {
        match self {
            Expr::Int(n) => *n == BigUint::from(0u8),
            Expr::Decimal(a, b) => a.chars().chain(b.chars()).all(|c| c == '0'),
            _ => false,
        }
    }
}

struct At<'a>(&'a Expr, u8);

impl fmt::Display for At<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.level() < self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(n) => write!(f, "{n}"),
            Expr::Decimal(a, b) => write!(f, "{a}.{b}"),
            Expr::W => write!(f, "w"),
            Expr::K => write!(f, "k"),
            Expr::Neutrix(n) => write!(f, "{n}"),
            Expr::Neg(a) => write!(f, "-{}", At(a, 7)),
            Expr::Binary(op, a, b) => match op {
                BinOp::Add => write!(f, "{} + {}", At(a, 5), At(b, 6)),
                BinOp::Sub => write!(f, "{} - {}", At(a, 5), At(b, 6)),
                BinOp::Mul => write!(f, "{}*{}", At(a, 6), At(b, 7)),
                BinOp::Div => write!(f, "{}/{}", At(a, 6), At(b, 7)),
                BinOp::Pow => write!(f, "{}^{}", At(a, 9), At(b, 7)),
            },
            Expr::Compare(op, a, b) => write!(f, "{} {} {}", At(a, 5), op.symbol(), At(b, 5)),
            Expr::In(a, s) => write!(f, "{} in {}", At(a, 5), At(s, 5)),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::Interval { lo, lo_closed, hi, hi_closed } => {
                let l = if *lo_closed { '[' } else { '(' };
                let r = if *hi_closed { ']' } else { ')' };
                write!(f, "{l}{lo}, {hi}{r}")
            }
            Expr::Singleton(a) => write!(f, "{{{a}}}"),
            Expr::Set(atom) => write!(f, "{}", atom.name()),
            Expr::Not(a) => write!(f, "~{}", At(a, 3)),
            Expr::And(a, b) => write!(f, "{} & {}", At(a, 2), At(b, 3)),
            Expr::Or(a, b) => write!(f, "{} | {}", At(a, 1), At(b, 2)),
        }
    }
}
