//! Concrete grammar shared by all calculi:
//!
//! ```text
//! term ::= atom+                        (application, left-associative)
//! atom ::= var | '\' var+ '.' term | 'S' | 'K' | '<' term '>'
//!        | 'A' '(' term ')' | ctxvar '[' term ']' | '(' term ')'
//! var  ::= [a-z][A-Za-z0-9_]*  (S, K, A reserved)
//! ```
//!
//! Generator names `#v<n>` / `#k<n>` are accepted so printed terms re-parse;
//! any other `#` name is an error. Lambda bodies extend maximally to the
//! right; `\x y. t` abbreviates nested abstractions.

use std::fmt;
use std::rc::Rc;

use crate::syntax::{self, check_calculus, close, CalculusId, CtxVarName, Term, VarName};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at position {}: {}", self.pos, self.msg)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Backslash,
    Dot,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    Shift,
    Callcc,
    Abort,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '\\' => {
                toks.push((Tok::Backslash, i));
                i += 1;
            }
            '.' => {
                toks.push((Tok::Dot, i));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '<' => {
                toks.push((Tok::LAngle, i));
                i += 1;
            }
            '>' => {
                toks.push((Tok::RAngle, i));
                i += 1;
            }
            '[' => {
                toks.push((Tok::LBracket, i));
                i += 1;
            }
            ']' => {
                toks.push((Tok::RBracket, i));
                i += 1;
            }
            'S' => {
                toks.push((Tok::Shift, i));
                i += 1;
            }
            'K' => {
                toks.push((Tok::Callcc, i));
                i += 1;
            }
            'A' => {
                toks.push((Tok::Abort, i));
                i += 1;
            }
            '#' => {
                let start = i;
                i += 1;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            c if c.is_ascii_lowercase() => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(text[start..i].to_string()), start));
            }
            other => {
                return Err(ParseError {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|(_, p)| *p).unwrap_or(self.end)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(t) if *t == want => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(ParseError {
                pos: self.here(),
                msg: format!("expected {what}"),
            }),
        }
    }

    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.here(),
            msg: msg.to_string(),
        })
    }

    // term ::= atom+
    fn term(&mut self, binders: &mut Vec<String>) -> Result<Rc<Term>, ParseError> {
        let mut acc = match self.atom(binders)? {
            Some(t) => t,
            None => return self.err("expected a term"),
        };
        while let Some(next) = self.atom(binders)? {
            acc = syntax::app(acc, next);
        }
        Ok(acc)
    }

    // Returns None when the lookahead cannot start an atom.
    fn atom(&mut self, binders: &mut Vec<String>) -> Result<Option<Rc<Term>>, ParseError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return Ok(None),
        };
        match tok {
            Tok::Ident(name) => {
                let start = self.here();
                self.bump();
                if self.peek() == Some(&Tok::LBracket) {
                    self.bump();
                    let k = CtxVarName::new(&name).map_err(|msg| ParseError { pos: start, msg })?;
                    let body = self.term(binders)?;
                    self.expect(Tok::RBracket, "`]`")?;
                    return Ok(Some(syntax::ctx_app(k, body)));
                }
                // innermost binder wins
                if let Some(rev) = binders.iter().rev().position(|b| *b == name) {
                    return Ok(Some(syntax::bound(rev)));
                }
                let v = VarName::new(&name).map_err(|msg| ParseError { pos: start, msg })?;
                Ok(Some(syntax::var(v)))
            }
            Tok::Backslash => {
                self.bump();
                let mut names = Vec::new();
                loop {
                    match self.peek() {
                        Some(Tok::Ident(n)) => {
                            let start = self.here();
                            // binder names get the same validation as variables
                            VarName::new(n).map_err(|msg| ParseError { pos: start, msg })?;
                            names.push(n.clone());
                            self.bump();
                        }
                        Some(Tok::Dot) => break,
                        _ => return self.err("expected binder name or `.`"),
                    }
                }
                if names.is_empty() {
                    return self.err("lambda needs at least one binder");
                }
                self.expect(Tok::Dot, "`.`")?;
                for n in &names {
                    binders.push(n.clone());
                }
                let mut body = self.term(binders)?;
                for n in names.iter().rev() {
                    binders.pop();
                    let x = VarName::new(n).expect("validated above");
                    body = syntax::lam(n, close(&body, &x));
                }
                Ok(Some(body))
            }
            Tok::Shift => {
                self.bump();
                Ok(Some(syntax::shift()))
            }
            Tok::Callcc => {
                self.bump();
                Ok(Some(syntax::callcc()))
            }
            Tok::Abort => {
                self.bump();
                self.expect(Tok::LParen, "`(` after `A`")?;
                let body = self.term(binders)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Some(syntax::abort(body)))
            }
            Tok::LAngle => {
                self.bump();
                let body = self.term(binders)?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(Some(syntax::reset(body)))
            }
            Tok::LParen => {
                self.bump();
                let body = self.term(binders)?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(Some(body))
            }
            Tok::Dot | Tok::RParen | Tok::RAngle | Tok::LBracket | Tok::RBracket => Ok(None),
        }
    }
}

/// Parses a term (or program, for the callcc calculus) and checks it against
/// the calculus.
pub fn parse_term(text: &str, calc: CalculusId) -> Result<Rc<Term>, ParseError> {
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.len(),
    };
    let mut binders = Vec::new();
    let t = p.term(&mut binders)?;
    if p.pos != p.toks.len() {
        return p.err("trailing input");
    }
    check_calculus(&t, calc).map_err(|e| ParseError {
        pos: 0,
        msg: e.to_string(),
    })?;
    Ok(t)
}
