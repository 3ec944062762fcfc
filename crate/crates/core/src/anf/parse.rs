//! Text format for polynomials.
//!
//! Terms are joined with `+`. Inside a term, single-character variable names
//! may be juxtaposed (`abcdijkl`); multi-character names (`Z00..Z63`, the
//! aliases `Z1..Z4`, `S1`, `S2`, `x1..x36`, and `@A..@H`) must be separated with
//! `*`. Parenthesised sums may be multiplied (`(a+b)(c+d)`). Whitespace is
//! ignored and `#` starts a comment running to the end of the line.

use thiserror::Error;

use super::poly::{Monomial, Polynomial};
use super::var::VarId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    Unexpected(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("'*' required next to multi-character name {0:?}")]
    MissingSeparator(String),
    #[error("unbalanced parenthesis")]
    Unbalanced,
}

/// How variable names are read and written.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Names {
    /// State letters `a-z`, `M-V`, and `F, K, L, Z, Y, X, W`, `Z00..Z63`, `@A..@H`.
    Standard,
    /// Abstract form letters `A-H` plus the placeholders `Z, Y, X, W`.
    Forms,
}

impl Names {
    fn name(self, v: VarId) -> String {
        match (self, v.form_index()) {
            (Names::Forms, Some(k)) => char::from(b'A' + k as u8).to_string(),
            _ => v.name(),
        }
    }
}

/// Parses a polynomial in the standard alphabet.
pub fn parse(text: &str) -> Result<Polynomial, ParseError> {
    parse_with(text, Names::Standard)
}

/// Parses a polynomial whose capitals `A-H` denote abstract linear forms.
pub fn parse_forms(text: &str) -> Result<Polynomial, ParseError> {
    parse_with(text, Names::Forms)
}

pub fn parse_with(text: &str, names: Names) -> Result<Polynomial, ParseError> {
    let tokens = lex(text, names)?;
    let mut parser = Parser { tokens, pos: 0, end: text.len() };
    let poly = parser.sum()?;
    match parser.peek() {
        None => Ok(poly),
        Some(t) => Err(ParseError {
            position: t.position,
            kind: match t.kind {
                Tok::Close => ParseErrorKind::Unbalanced,
                _ => ParseErrorKind::Unexpected(text[t.position..].chars().next().unwrap()),
            },
        }),
    }
}

/// Renders in canonical term order with standard names.
pub fn render(p: &Polynomial) -> String {
    render_with(p, Names::Standard)
}

pub fn render_with(p: &Polynomial, names: Names) -> String {
    if p.is_zero() {
        return "0".into();
    }
    p.terms()
        .map(|m| render_monomial(m, &names))
        .collect::<Vec<_>>()
        .join("+")
}

pub(crate) fn render_monomial(m: Monomial, names: &Names) -> String {
    if m == Monomial::ONE {
        return "1".into();
    }
    let mut out = String::new();
    let mut prev_multi = None;
    for v in m.vars() {
        let name = names.name(v);
        let multi = name.chars().count() > 1;
        if let Some(pm) = prev_multi {
            if pm || multi {
                out.push('*');
            }
        }
        out.push_str(&name);
        prev_multi = Some(multi);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Plus,
    Star,
    Open,
    Close,
    Const(bool),
    Var { var: VarId, multi: bool, text: String },
}

#[derive(Debug, Clone)]
struct Token {
    kind: Tok,
    position: usize,
}

fn lex(text: &str, names: Names) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    let err = |position, kind| Err(ParseError { position, kind });
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let simple = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'#' => {
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'*' => Some(Tok::Star),
            b'(' => Some(Tok::Open),
            b')' => Some(Tok::Close),
            b'0' => Some(Tok::Const(false)),
            b'1' => Some(Tok::Const(true)),
            _ => None,
        };
        if let Some(kind) = simple {
            tokens.push(Token { kind, position: start });
            i += 1;
            continue;
        }
        if !c.is_ascii() {
            let ch = text[i..].chars().next().unwrap();
            return err(i, ParseErrorKind::Unexpected(ch));
        }
        // longest name starting here: letter (or '@') followed by digits / a letter
        let mut j = i + 1;
        let multi_lead = matches!((names, c), (Names::Standard, b'Z' | b'S' | b'x'));
        if c == b'@' {
            if j < bytes.len() && bytes[j].is_ascii_alphabetic() {
                j += 1;
            }
        } else if multi_lead {
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
        }
        let name = &text[i..j];
        let var = match names {
            Names::Standard => VarId::from_name(name),
            Names::Forms => match c {
                b'A'..=b'H' if j == i + 1 => Some(VarId::form((c - b'A') as usize)),
                b'Z' | b'Y' | b'X' | b'W' if j == i + 1 => VarId::from_name(name),
                _ => None,
            },
        };
        match var {
            Some(var) => tokens.push(Token {
                kind: Tok::Var { var, multi: j - i > 1, text: name.to_string() },
                position: start,
            }),
            None if c.is_ascii_alphabetic() || c == b'@' => {
                return err(start, ParseErrorKind::UnknownVariable(name.to_string()))
            }
            None => return err(start, ParseErrorKind::Unexpected(c as char)),
        }
        i = j;
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn sum(&mut self) -> Result<Polynomial, ParseError> {
        let mut acc = self.term()?;
        while matches!(self.peek(), Some(Token { kind: Tok::Plus, .. })) {
            self.pos += 1;
            acc += &self.term()?;
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial, ParseError> {
        let (mut acc, mut prev_joinable, mut prev_text) = self.factor()?;
        loop {
            match self.peek().map(|t| &t.kind) {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let (f, joinable, text) = self.factor()?;
                    acc = acc.mul(&f);
                    prev_joinable = joinable;
                    prev_text = text;
                }
                Some(Tok::Var { .. } | Tok::Open | Tok::Const(_)) => {
                    let position = self.here();
                    let (f, joinable, text) = self.factor()?;
                    if !prev_joinable || !joinable {
                        let offender = if prev_joinable { text } else { prev_text };
                        return Err(ParseError {
                            position,
                            kind: ParseErrorKind::MissingSeparator(offender),
                        });
                    }
                    acc = acc.mul(&f);
                    prev_joinable = joinable;
                    prev_text = text;
                }
                _ => return Ok(acc),
            }
        }
    }

    /// Returns the factor, whether it may be juxtaposed, and its source text.
    fn factor(&mut self) -> Result<(Polynomial, bool, String), ParseError> {
        let position = self.here();
        let Some(tok) = self.tokens.get(self.pos).cloned() else {
            return Err(ParseError { position, kind: ParseErrorKind::UnexpectedEnd });
        };
        self.pos += 1;
        match tok.kind {
            Tok::Var { var, multi, text } => Ok((Polynomial::var(var), !multi, text)),
            Tok::Const(b) => Ok((Polynomial::constant(b), false, if b { "1" } else { "0" }.into())),
            Tok::Open => {
                let inner = self.sum()?;
                match self.peek() {
                    Some(Token { kind: Tok::Close, .. }) => {
                        self.pos += 1;
                        Ok((inner, true, "(...)".into()))
                    }
                    _ => Err(ParseError { position, kind: ParseErrorKind::Unbalanced }),
                }
            }
            Tok::Close => Err(ParseError { position, kind: ParseErrorKind::Unbalanced }),
            Tok::Plus => Err(ParseError { position, kind: ParseErrorKind::Unexpected('+') }),
            Tok::Star => Err(ParseError { position, kind: ParseErrorKind::Unexpected('*') }),
        }
    }
}
