use std::fmt;

use num_traits::Signed;

use super::lexer::Pos;
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum ExprKind {
    Num(Rational),
    Name(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Rational),
    /// `binom(λ)(e)`
    Binom(Rational, Box<Expr>),
    Call(String, Vec<Arg>),
}

#[derive(Clone, Debug)]
pub enum Arg {
    Expr(Expr),
    /// `x -> e`
    Map(String, Expr),
    /// `[a, b[` and friends; `_` is unbounded.
    Interval(Interval),
    /// `x in [a, b[`; the name `deg` means total degree.
    In(String, Interval),
}

#[derive(Clone, Debug)]
pub struct Interval {
    pub lo: Option<Expr>,
    pub lo_closed: bool,
    pub hi: Option<Expr>,
    pub hi_closed: bool,
}

#[derive(Clone, Debug)]
pub struct Stmt {
    pub kind: StmtKind,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum StmtKind {
    /// Generators, coarsest first.
    Group(Vec<String>),
    Var(Vec<String>),
    Let(String, Expr),
    Show(Expr, Option<usize>),
    ClosureCheck {
        fixture: String,
        without: Vec<String>,
        depth: Option<usize>,
        probe: Option<usize>,
    },
    Selftest(usize),
}

#[derive(Clone, Debug, Default)]
pub struct Program {
    pub stmts: Vec<Stmt>,
}

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn exponent(e: &Rational) -> String {
    if e.is_integer() && !e.is_negative() {
        rational::fmt(e)
    } else {
        format!("({})", rational::fmt(e))
    }
}

impl Expr {
    fn prec(&self) -> u8 {
        match &self.kind {
            ExprKind::Add(..) | ExprKind::Sub(..) => SUM,
            ExprKind::Mul(..) => PRODUCT,
            ExprKind::Neg(_) => UNARY,
            ExprKind::Pow(..) => POWER,
            ExprKind::Num(c) if c.is_negative() => UNARY,
            _ => ATOM,
        }
    }

    fn write(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let paren = self.prec() < ctx;
        if paren {
            write!(f, "(")?;
        }
        match &self.kind {
            ExprKind::Num(c) => write!(f, "{}", rational::fmt(c))?,
            ExprKind::Name(n) => write!(f, "{n}")?,
            ExprKind::Neg(a) => {
                write!(f, "-")?;
                a.write(f, UNARY)?;
            }
            ExprKind::Add(a, b) | ExprKind::Sub(a, b) => {
                a.write(f, SUM)?;
                write!(f, " {} ", if matches!(self.kind, ExprKind::Add(..)) { "+" } else { "-" })?;
                b.write(f, PRODUCT)?;
            }
            ExprKind::Mul(a, b) => {
                a.write(f, PRODUCT)?;
                write!(f, "*")?;
                b.write(f, UNARY)?;
            }
            ExprKind::Pow(a, e) => {
                a.write(f, ATOM)?;
                write!(f, "^{}", exponent(e))?;
            }
            ExprKind::Binom(l, a) => {
                write!(f, "binom({})(", rational::fmt(l))?;
                a.write(f, 0)?;
                write!(f, ")")?;
            }
            ExprKind::Call(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")?;
            }
        }
        if paren {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bound = |e: &Option<Expr>| e.as_ref().map_or("_".to_string(), |e| e.to_string());
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { "[" } else { "]" },
            bound(&self.lo),
            bound(&self.hi),
            if self.hi_closed { "]" } else { "[" }
        )
    }
}

impl fmt::Display for Arg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Arg::Expr(e) => write!(f, "{e}"),
            Arg::Map(x, e) => write!(f, "{x} -> {e}"),
            Arg::Interval(i) => write!(f, "{i}"),
            Arg::In(x, i) => write!(f, "{x} in {i}"),
        }
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            StmtKind::Group(gs) => write!(f, "group {};", gs.join(" > ")),
            StmtKind::Var(vs) => write!(f, "var {};", vs.join(", ")),
            StmtKind::Let(n, e) => write!(f, "let {n} = {e};"),
            StmtKind::Show(e, d) => match d {
                Some(d) => write!(f, "show {e} depth {d};"),
                None => write!(f, "show {e};"),
            },
            StmtKind::ClosureCheck {
                fixture,
                without,
                depth,
                probe,
            } => {
                write!(f, "closure-check {fixture}")?;
                if !without.is_empty() {
                    write!(f, " without {}", without.join(", "))?;
                }
                if let Some(d) = depth {
                    write!(f, " depth {d}")?;
                }
                if let Some(p) = probe {
                    write!(f, " probe {p}")?;
                }
                write!(f, ";")
            }
            StmtKind::Selftest(n) => write!(f, "selftest {n};"),
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.stmts {
            writeln!(f, "{s}")?;
        }
        Ok(())
    }
}
