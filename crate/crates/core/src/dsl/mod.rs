//! A small language for building series and running checks.
//!
//! ```text
//! group u > t;
//! var x;
//! let f = geom(x);
//! show interp(f, x -> t*(1/2 + u)) depth 6;
//! show trunc(inv(1 - t), t^(5/2));
//! closure-check rank_two depth 3 probe 10;
//! ```

mod ast;
mod corpus;
mod lexer;
mod parser;
mod run;
#[cfg(test)]
mod tests;

pub use ast::{Arg, Expr, ExprKind, Interval, Program, Stmt, StmtKind};
pub use corpus::{check_corpus, render, CorpusResult};
pub use lexer::Pos;
pub use parser::{parse, parse_expr};
pub use run::{random_series, ring_law_failures, OutputRecord, RunConfig, Session};

/// Parses and runs `src` in a fresh session.
pub fn run_source(src: &str, config: RunConfig) -> crate::error::Result<Vec<OutputRecord>> {
    let program = parse(src)?;
    Ok(Session::new(config).run(&program))
}

/// Canonical source text for `src`.
pub fn canonical(src: &str) -> crate::error::Result<String> {
    Ok(parse(src)?.to_string())
}
