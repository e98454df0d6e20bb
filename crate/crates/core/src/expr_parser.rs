//! Polynomial and unit-rational expressions in `x`, `y`.
//!
//! Grammar, loosest to tightest:
//!
//! ```text
//! expr    := expr ('+' | '-') expr
//!          | expr ('*' | '/') expr | expr expr      (implicit product)
//!          | '-' expr
//!          | expr '^' INT                           (right associative)
//!          | NUMBER | 'i' | 'x' | 'y' | IDENT | '(' expr ')'
//! ```
//!
//! An implicit product needs a number, identifier or closing parenthesis on
//! the left and an identifier or opening parenthesis on the right, so `2x`,
//! `(1-x)y` and `3(x+1)` parse while `2 3` does not. Exponents must reduce to
//! a nonnegative integer literal.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::multiseries::{self, CSeries2, Complex, SeriesError};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    I,
    X,
    Y,
    Param(String),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at line {line}, column {column}: expected {}, found {found}", .expected.join(" or "))]
    Syntax {
        offset: usize,
        line: usize,
        column: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),
    #[error("division by a series with zero constant term")]
    DivisionBySeriesWithZeroConstantTerm,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.len(), |nl| before.len() - nl - 1) + 1;
    (line, column)
}

fn syntax(text: &str, offset: usize, expected: &[&str], found: String) -> ExprError {
    let (line, column) = line_col(text, offset);
    ExprError::Syntax {
        offset,
        line,
        column,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found,
    }
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ExprError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i];
        if ch.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let tok = match ch {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                // exponent only when digits follow, so `2e` stays `2 * e`
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lit = &text[start..i];
                let v: f64 = lit
                    .parse()
                    .map_err(|_| syntax(text, start, &["number"], format!("`{lit}`")))?;
                out.push((Tok::Num(v), start));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let found = text[start..].chars().next().unwrap_or('?');
                return Err(syntax(
                    text,
                    start,
                    &["number", "identifier", "operator", "parenthesis"],
                    format!("`{found}`"),
                ));
            }
        };
        out.push((tok, start));
        i += 1;
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

const BP_ADD: u8 = 1;
const BP_MUL: u8 = 3;
const BP_NEG: u8 = 5;
const BP_POW: u8 = 7;

struct Parser<'a> {
    text: &'a str,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ExprError {
        syntax(self.text, self.offset(), expected, self.peek().describe())
    }

    fn prefix(&mut self) -> Result<Expr, ExprError> {
        match self.peek().clone() {
            Tok::Num(v) => {
                self.bump();
                Ok(Expr::Num(v))
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(match name.as_str() {
                    "x" => Expr::X,
                    "y" => Expr::Y,
                    "i" => Expr::I,
                    _ => Expr::Param(name),
                })
            }
            Tok::Minus => {
                self.bump();
                let operand = self.expr(BP_NEG)?;
                Ok(Expr::Neg(Box::new(operand)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr(0)?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error(&["`)`", "operator"]));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error(&["number", "identifier", "`-`", "`(`"])),
        }
    }

    fn exponent(&mut self) -> Result<u32, ExprError> {
        let at = self.offset();
        let rhs = self.expr(BP_POW - 1)?;
        fold_exponent(&rhs).ok_or_else(|| syntax(self.text, at, &["nonnegative integer exponent"], format!("`{rhs}`")))
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr, ExprError> {
        let mut lhs = self.prefix()?;
        loop {
            let (lbp, implicit) = match self.peek() {
                Tok::Plus | Tok::Minus => (BP_ADD, false),
                Tok::Star | Tok::Slash => (BP_MUL, false),
                Tok::Caret => (BP_POW + 1, false),
                Tok::Ident(_) | Tok::LParen => (BP_MUL, true),
                Tok::RParen | Tok::Eof => break,
                Tok::Num(_) => return Err(self.error(&["operator", "`)`", "end of input"])),
            };
            if lbp <= min_bp {
                break;
            }
            if implicit {
                let rhs = self.expr(BP_MUL)?;
                lhs = Expr::Mul(Box::new(lhs), Box::new(rhs));
                continue;
            }
            let op = self.bump();
            lhs = match op {
                Tok::Caret => Expr::Pow(Box::new(lhs), self.exponent()?),
                Tok::Plus => Expr::Add(Box::new(lhs), Box::new(self.expr(BP_ADD)?)),
                Tok::Minus => Expr::Sub(Box::new(lhs), Box::new(self.expr(BP_ADD)?)),
                Tok::Star => Expr::Mul(Box::new(lhs), Box::new(self.expr(BP_MUL)?)),
                Tok::Slash => Expr::Div(Box::new(lhs), Box::new(self.expr(BP_MUL)?)),
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }
}

fn fold_exponent(e: &Expr) -> Option<u32> {
    match e {
        Expr::Num(v) if *v >= 0.0 && v.fract() == 0.0 && *v <= f64::from(u32::MAX) => Some(*v as u32),
        Expr::Pow(base, k) => fold_exponent(base)?.checked_pow(*k),
        _ => None,
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ExprError> {
    let toks = tokenize(text)?;
    let mut p = Parser { text, toks, pos: 0 };
    if *p.peek() == Tok::Eof {
        return Err(p.error(&["expression"]));
    }
    let e = p.expr(0)?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(&["operator", "end of input"]));
    }
    Ok(e)
}

impl fmt::Display for Expr {
    /// Fully parenthesised; parsing the output gives back the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::I => write!(f, "i"),
            Expr::X => write!(f, "x"),
            Expr::Y => write!(f, "y"),
            Expr::Param(p) => write!(f, "{p}"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Pow(a, k) => write!(f, "({a}^{k})"),
        }
    }
}

impl Expr {
    /// Parameter names in first-appearance order, with repeats.
    pub fn params(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Param(p) => out.push(p),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect_params(out),
            Expr::Num(_) | Expr::I | Expr::X | Expr::Y => {}
        }
    }
}

pub fn to_series(ast: &Expr, params: &HashMap<String, Complex>, order: u32) -> Result<CSeries2, ExprError> {
    let s = match ast {
        Expr::Num(v) => CSeries2::constant(Complex::new(*v, 0.0), order),
        Expr::I => CSeries2::constant(Complex::new(0.0, 1.0), order),
        Expr::X => CSeries2::x(order),
        Expr::Y => CSeries2::y(order),
        Expr::Param(name) => {
            let v = params
                .get(name)
                .ok_or_else(|| ExprError::UnboundParameter(name.clone()))?;
            CSeries2::constant(*v, order)
        }
        Expr::Add(a, b) => &to_series(a, params, order)? + &to_series(b, params, order)?,
        Expr::Sub(a, b) => &to_series(a, params, order)? - &to_series(b, params, order)?,
        Expr::Mul(a, b) => multiseries::cauchy_mul(&to_series(a, params, order)?, &to_series(b, params, order)?),
        Expr::Div(a, b) => {
            let den = to_series(b, params, order)?;
            let inv = multiseries::reciprocal(&den).map_err(|e| match e {
                SeriesError::ZeroConstantTerm => ExprError::DivisionBySeriesWithZeroConstantTerm,
                SeriesError::NonFinite { .. } => ExprError::DivisionBySeriesWithZeroConstantTerm,
            })?;
            multiseries::cauchy_mul(&to_series(a, params, order)?, &inv)
        }
        Expr::Neg(a) => -&to_series(a, params, order)?,
        Expr::Pow(a, k) => multiseries::powu(&to_series(a, params, order)?, *k),
    };
    Ok(s)
}

/// Parses and expands in one step.
pub fn series_of(text: &str, params: &HashMap<String, Complex>, order: u32) -> Result<CSeries2, ExprError> {
    to_series(&parse_expr(text)?, params, order)
}
