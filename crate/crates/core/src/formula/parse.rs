//! Recursive-descent parser for the formula grammar.
//!
//! ```text
//! formula := 'EX' ident '.' formula | 'ALL' ident '.' formula | disj
//! disj    := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := '!' unary | '(' formula ')' | 'true' | 'false' | quant | atom
//! atom    := term rel term          rel in < <= = != > >=
//! term    := factor (('+' | '-') factor)*
//! factor  := '-' factor | rational ['*' ident] | ident
//! ```
//!
//! Free identifiers resolve to coordinates in the order given by the caller;
//! each binder gets the next index after everything in scope.

use thiserror::Error;

use super::{Formula, Rel};
use crate::arith::{parse_rational, LinTerm, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{name}` at byte {pos}")]
    UnknownIdent { name: String, pos: usize },
    #[error("malformed rational literal `{text}` at byte {pos}")]
    BadRational { text: String, pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(String),
    Ident(String),
    Ex,
    All,
    True,
    False,
    Slash,
    Star,
    Plus,
    Minus,
    Lt,
    Le,
    Eq,
    Ne,
    Gt,
    Ge,
    Amp,
    Bar,
    Bang,
    LParen,
    RParen,
    Dot,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((Tok::Int(text[start..i].to_string()), start));
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
            {
                i += 1;
            }
            let word = &text[start..i];
            let tok = match word {
                "EX" => Tok::Ex,
                "ALL" => Tok::All,
                "true" => Tok::True,
                "false" => Tok::False,
                _ => Tok::Ident(word.to_string()),
            };
            out.push((tok, start));
            continue;
        }
        let two = bytes.get(i + 1).copied();
        let (tok, len) = match (c, two) {
            (b'<', Some(b'=')) => (Tok::Le, 2),
            (b'>', Some(b'=')) => (Tok::Ge, 2),
            (b'!', Some(b'=')) => (Tok::Ne, 2),
            (b'<', _) => (Tok::Lt, 1),
            (b'>', _) => (Tok::Gt, 1),
            (b'=', _) => (Tok::Eq, 1),
            (b'!', _) => (Tok::Bang, 1),
            (b'/', _) => (Tok::Slash, 1),
            (b'*', _) => (Tok::Star, 1),
            (b'+', _) => (Tok::Plus, 1),
            (b'-', _) => (Tok::Minus, 1),
            (b'&', _) => (Tok::Amp, 1),
            (b'|', _) => (Tok::Bar, 1),
            (b'(', _) => (Tok::LParen, 1),
            (b')', _) => (Tok::RParen, 1),
            (b'.', _) => (Tok::Dot, 1),
            _ => {
                let ch = text[i..].chars().next().unwrap();
                return Err(ParseError::Syntax {
                    pos: i,
                    msg: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((tok, start));
        i += len;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    /// Names in scope, innermost binder last.
    scope: Vec<String>,
    free: usize,
    /// When set, unknown free identifiers are appended instead of rejected.
    auto: bool,
    /// Free identifiers in order of first occurrence, for `auto`.
    seen: Vec<String>,
    _text: &'a str,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, vars: &[String], auto: bool) -> Result<Self, ParseError> {
        Ok(Parser {
            toks: tokenize(text)?,
            pos: 0,
            end: text.len(),
            scope: vars.to_vec(),
            free: vars.len(),
            auto,
            seen: Vec::new(),
            _text: text,
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected {what}")))
        }
    }

    fn syntax(&self, msg: String) -> ParseError {
        let found = match self.peek() {
            Some(t) => format!("{t:?}"),
            None => "end of input".to_string(),
        };
        ParseError::Syntax {
            pos: self.here(),
            msg: format!("{msg}, found {found}"),
        }
    }

    fn dim(&self) -> usize {
        self.scope.len()
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if matches!(self.peek(), Some(Tok::Ex) | Some(Tok::All)) {
            return self.quantified();
        }
        self.disj()
    }

    fn quantified(&mut self) -> Result<Formula, ParseError> {
        let universal = self.bump() == Some(Tok::All);
        let name = match self.bump() {
            Some(Tok::Ident(n)) => n,
            _ => {
                self.pos -= 1;
                return Err(self.syntax("expected a variable after quantifier".into()));
            }
        };
        self.expect(Tok::Dot, "`.` after bound variable")?;
        let var = self.scope.len();
        self.scope.push(name);
        let body = self.formula();
        self.scope.pop();
        let body = body?;
        Ok(if universal {
            Formula::forall(var, body)
        } else {
            Formula::exists(var, body)
        })
    }

    fn disj(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.conj()?];
        while self.eat(&Tok::Bar) {
            parts.push(self.conj()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::Or(parts)
        })
    }

    fn conj(&mut self) -> Result<Formula, ParseError> {
        let mut parts = vec![self.unary()?];
        while self.eat(&Tok::Amp) {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Formula::And(parts)
        })
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::Bang) => {
                self.pos += 1;
                Ok(Formula::not(self.unary()?))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Some(Tok::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ex) | Some(Tok::All) => self.quantified(),
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.term()?;
        let rel = match self.peek() {
            Some(t @ (Tok::Lt | Tok::Le | Tok::Eq | Tok::Ne | Tok::Gt | Tok::Ge)) => t.clone(),
            _ => return Err(self.syntax("expected a relation".into())),
        };
        self.pos += 1;
        let rhs = self.term()?;
        let dim = self.dim();
        let (lhs, rhs) = (lhs.with_dim(dim), rhs.with_dim(dim));
        let lt = |a: &LinTerm, b: &LinTerm| Formula::atom(a - b, Rel::Lt);
        let eq = |a: &LinTerm, b: &LinTerm| Formula::atom(a - b, Rel::Eq);
        Ok(match rel {
            Tok::Lt => lt(&lhs, &rhs),
            Tok::Gt => lt(&rhs, &lhs),
            Tok::Eq => eq(&lhs, &rhs),
            Tok::Le => Formula::Or(vec![lt(&lhs, &rhs), eq(&lhs, &rhs)]),
            Tok::Ge => Formula::Or(vec![lt(&rhs, &lhs), eq(&lhs, &rhs)]),
            Tok::Ne => Formula::Or(vec![lt(&lhs, &rhs), lt(&rhs, &lhs)]),
            _ => unreachable!(),
        })
    }

    fn term(&mut self) -> Result<LinTerm, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(&Tok::Plus) {
                acc = &acc + &self.factor()?;
            } else if self.eat(&Tok::Minus) {
                acc = &acc - &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<LinTerm, ParseError> {
        match self.peek().cloned() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(-self.factor()?)
            }
            Some(Tok::Int(_)) => {
                let q = self.rational()?;
                if self.eat(&Tok::Star) {
                    let var = self.ident()?;
                    Ok(LinTerm::var(self.dim(), var).scale(&q))
                } else {
                    Ok(LinTerm::constant(self.dim(), q))
                }
            }
            Some(Tok::Ident(_)) => {
                let var = self.ident()?;
                Ok(LinTerm::var(self.dim(), var))
            }
            _ => Err(self.syntax("expected a term".into())),
        }
    }

    fn rational(&mut self) -> Result<Rational, ParseError> {
        let start = self.here();
        let Some(Tok::Int(num)) = self.bump() else {
            unreachable!()
        };
        let mut text = num;
        if self.eat(&Tok::Slash) {
            match self.bump() {
                Some(Tok::Int(den)) => {
                    text.push('/');
                    text.push_str(&den);
                }
                _ => {
                    return Err(ParseError::BadRational {
                        text: format!("{text}/"),
                        pos: start,
                    })
                }
            }
        }
        parse_rational(&text).ok_or(ParseError::BadRational { text, pos: start })
    }

    fn ident(&mut self) -> Result<usize, ParseError> {
        let pos = self.here();
        let Some(Tok::Ident(name)) = self.bump() else {
            self.pos -= 1;
            return Err(self.syntax("expected an identifier".into()));
        };
        if let Some(i) = self.scope.iter().rposition(|n| *n == name) {
            return Ok(i);
        }
        if self.auto {
            if !self.seen.contains(&name) {
                self.seen.push(name.clone());
            }
            if self.scope.len() == self.free {
                self.scope.push(name);
                self.free += 1;
                return Ok(self.scope.len() - 1);
            }
            // only names are wanted; any in-scope index will do
            return Ok(0);
        }
        Err(ParseError::UnknownIdent { name, pos })
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            return Err(self.syntax("unexpected trailing input".into()));
        }
        Ok(())
    }
}

/// Parses `text` with free variables resolved against `vars`.
pub fn parse(text: &str, vars: &[String]) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, vars, false)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Free identifiers of `text` in order of first occurrence.
pub fn free_names(text: &str) -> Result<Vec<String>, ParseError> {
    let mut p = Parser::new(text, &[], true)?;
    p.formula()?;
    p.finish()?;
    Ok(p.seen)
}

/// Parses a standalone term such as `2*x - 1/2*y + 3`.
pub fn parse_term(text: &str, vars: &[String]) -> Result<LinTerm, ParseError> {
    let mut p = Parser::new(text, vars, false)?;
    let t = p.term()?;
    p.finish()?;
    Ok(t.with_dim(vars.len()))
}
