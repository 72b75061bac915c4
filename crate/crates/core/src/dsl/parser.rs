use num_bigint::BigInt;

use super::ast::*;
use super::lexer::{lex, syntax, Pos, Tok};
use crate::error::Result;
use crate::rational::Rational;

pub fn parse(src: &str) -> Result<Program> {
    let mut p = Parser { toks: lex(src)?, i: 0 };
    let mut stmts = Vec::new();
    while p.peek() != &Tok::Eof {
        stmts.push(p.stmt()?);
    }
    Ok(Program { stmts })
}

/// Parses a single expression, for the REPL and tests.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { toks: lex(src)?, i: 0 };
    let e = p.expr()?;
    p.expect_eof()?;
    Ok(e)
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(syntax(self.pos(), format!("expected `{s}`, found {}", self.peek())))
        }
    }

    fn expect_eof(&self) -> Result<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            t => Err(syntax(self.pos(), format!("unexpected {t}"))),
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.bump() {
            (Tok::Ident(s), _) => Ok(s),
            (t, pos) => Err(syntax(pos, format!("expected a name, found {t}"))),
        }
    }

    fn int(&mut self) -> Result<BigInt> {
        match self.bump() {
            (Tok::Int(s), _) => Ok(s.parse().expect("digits")),
            (t, pos) => Err(syntax(pos, format!("expected a number, found {t}"))),
        }
    }

    fn count(&mut self) -> Result<usize> {
        let pos = self.pos();
        let n = self.int()?;
        usize::try_from(n).map_err(|_| syntax(pos, "number too large"))
    }

    /// `p` or `p/q`
    fn rational(&mut self) -> Result<Rational> {
        let pos = self.pos();
        let n = self.int()?;
        if self.eat_sym("/") {
            let d = self.int()?;
            if d == BigInt::from(0) {
                return Err(syntax(pos, "zero denominator"));
            }
            return Ok(Rational::new(n, d));
        }
        Ok(Rational::from_integer(n))
    }

    fn signed_rational(&mut self) -> Result<Rational> {
        let neg = self.eat_sym("-");
        let r = self.rational()?;
        Ok(if neg { -r } else { r })
    }

    fn stmt(&mut self) -> Result<Stmt> {
        let pos = self.pos();
        let word = self.ident()?;
        let kind = match word.as_str() {
            "group" => {
                let mut gs = vec![self.ident()?];
                while self.eat_sym(">") {
                    gs.push(self.ident()?);
                }
                StmtKind::Group(gs)
            }
            "var" => {
                let mut vs = vec![self.ident()?];
                while self.eat_sym(",") {
                    vs.push(self.ident()?);
                }
                StmtKind::Var(vs)
            }
            "let" => {
                let n = self.ident()?;
                self.expect_sym("=")?;
                StmtKind::Let(n, self.expr()?)
            }
            "show" => {
                let e = self.expr()?;
                let d = if self.is_word("depth") {
                    self.bump();
                    Some(self.count()?)
                } else {
                    None
                };
                StmtKind::Show(e, d)
            }
            "closure" => {
                self.expect_sym("-")?;
                let p = self.pos();
                if self.ident()? != "check" {
                    return Err(syntax(p, "expected `closure-check`"));
                }
                let fixture = self.ident()?;
                let mut without = Vec::new();
                let (mut depth, mut probe) = (None, None);
                if self.is_word("without") {
                    self.bump();
                    without.push(self.ident()?);
                    while self.eat_sym(",") {
                        without.push(self.ident()?);
                    }
                }
                if self.is_word("depth") {
                    self.bump();
                    depth = Some(self.count()?);
                }
                if self.is_word("probe") {
                    self.bump();
                    probe = Some(self.count()?);
                }
                StmtKind::ClosureCheck {
                    fixture,
                    without,
                    depth,
                    probe,
                }
            }
            "selftest" => StmtKind::Selftest(self.count()?),
            _ => return Err(syntax(pos, format!("unknown statement `{word}`"))),
        };
        self.expect_sym(";")?;
        Ok(Stmt { kind, pos })
    }

    pub fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        loop {
            let pos = self.pos();
            let add = if self.eat_sym("+") {
                true
            } else if self.eat_sym("-") {
                false
            } else {
                return Ok(lhs);
            };
            let rhs = Box::new(self.product()?);
            let kind = if add {
                ExprKind::Add(Box::new(lhs), rhs)
            } else {
                ExprKind::Sub(Box::new(lhs), rhs)
            };
            lhs = Expr { kind, pos };
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            let pos = self.pos();
            if !self.eat_sym("*") {
                return Ok(lhs);
            }
            let rhs = self.unary()?;
            lhs = Expr {
                kind: ExprKind::Mul(Box::new(lhs), Box::new(rhs)),
                pos,
            };
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        let pos = self.pos();
        if self.eat_sym("-") {
            let a = self.unary()?;
            return Ok(Expr {
                kind: ExprKind::Neg(Box::new(a)),
                pos,
            });
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        let pos = self.pos();
        if !self.eat_sym("^") {
            return Ok(base);
        }
        let e = if self.eat_sym("(") {
            let r = self.signed_rational()?;
            self.expect_sym(")")?;
            r
        } else {
            Rational::from_integer(self.int()?)
        };
        Ok(Expr {
            kind: ExprKind::Pow(Box::new(base), e),
            pos,
        })
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Int(_) => Ok(Expr {
                kind: ExprKind::Num(self.rational()?),
                pos,
            }),
            Tok::Sym("(") => {
                self.bump();
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                if !self.is_sym("(") {
                    return Ok(Expr {
                        kind: ExprKind::Name(name),
                        pos,
                    });
                }
                self.bump();
                if name == "binom" {
                    let l = self.signed_rational()?;
                    self.expect_sym(")")?;
                    self.expect_sym("(")?;
                    let a = self.expr()?;
                    self.expect_sym(")")?;
                    return Ok(Expr {
                        kind: ExprKind::Binom(l, Box::new(a)),
                        pos,
                    });
                }
                let mut args = Vec::new();
                if !self.eat_sym(")") {
                    loop {
                        args.push(self.arg()?);
                        if self.eat_sym(")") {
                            break;
                        }
                        self.expect_sym(",")?;
                    }
                }
                Ok(Expr {
                    kind: ExprKind::Call(name, args),
                    pos,
                })
            }
            t => Err(syntax(pos, format!("expected an expression, found {t}"))),
        }
    }

    fn arg(&mut self) -> Result<Arg> {
        if self.is_sym("[") || self.is_sym("]") {
            return Ok(Arg::Interval(self.interval()?));
        }
        if let Tok::Ident(x) = self.peek().clone() {
            if matches!(self.peek_at(1), Tok::Sym("->")) {
                self.bump();
                self.bump();
                return Ok(Arg::Map(x, self.expr()?));
            }
            if matches!(self.peek_at(1), Tok::Ident(w) if w == "in") {
                self.bump();
                self.bump();
                return Ok(Arg::In(x, self.interval()?));
            }
        }
        Ok(Arg::Expr(self.expr()?))
    }

    fn bound(&mut self) -> Result<Option<Expr>> {
        if self.eat_sym("_") {
            Ok(None)
        } else {
            Ok(Some(self.expr()?))
        }
    }

    fn interval(&mut self) -> Result<Interval> {
        let lo_closed = if self.eat_sym("[") {
            true
        } else {
            self.expect_sym("]")?;
            false
        };
        let lo = self.bound()?;
        self.expect_sym(",")?;
        let hi = self.bound()?;
        let hi_closed = if self.eat_sym("]") {
            true
        } else {
            self.expect_sym("[")?;
            false
        };
        Ok(Interval {
            lo,
            lo_closed,
            hi,
            hi_closed,
        })
    }
}
