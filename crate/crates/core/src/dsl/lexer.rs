use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) | Tok::Int(s) => write!(f, "`{s}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

pub fn syntax(pos: Pos, msg: impl fmt::Display) -> Error {
    Error::Parse {
        line: pos.line,
        col: pos.col,
        msg: msg.to_string(),
    }
}

const SYMBOLS: [&str; 16] = ["->", "+", "-", "*", "/", "^", "(", ")", "[", "]", ",", ";", "=", ">", "_", ":"];

pub fn lex(src: &str) -> Result<Vec<(Tok, Pos)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
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
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let start = i;
        if c.is_ascii_digit() {
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Int(chars[start..i].iter().collect()), pos));
        } else if c.is_ascii_alphabetic() || (c == '_' && chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric())) {
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), pos));
        } else {
            let rest: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let Some(s) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(syntax(pos, format!("unexpected character `{c}`")));
            };
            i += s.len();
            out.push((Tok::Sym(s), pos));
        }
        col += i - start;
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}
