//! Reaction DSL.
//!
//! ```text
//! mechanism := reaction ("," reaction)*
//! reaction  := side ("->" | "<->") side
//! side      := "0" | term ("+" term)*
//! term      := [uint] ident
//! ident     := letter (letter | digit | "_")*
//! ```
//!
//! Whitespace is insignificant. `<->` produces the forward step followed by
//! the backward step.

use super::{Complex, ReactionStep};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Uint(u64),
    Plus,
    Comma,
    Arrow,
    BiArrow,
    End,
}

impl Tok {
    fn text(&self) -> String {
        match self {
            Tok::Ident(s) => s.clone(),
            Tok::Uint(n) => n.to_string(),
            Tok::Plus => "+".into(),
            Tok::Comma => ",".into(),
            Tok::Arrow => "->".into(),
            Tok::BiArrow => "<->".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(text[start..i].to_string())));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i].parse::<u64>().map_err(|_| Error::Syntax {
                position: start,
                token: text[start..i].to_string(),
                message: "coefficient out of range".into(),
            })?;
            out.push((start, Tok::Uint(n)));
        } else if c == '+' {
            out.push((i, Tok::Plus));
            i += 1;
        } else if c == ',' {
            out.push((i, Tok::Comma));
            i += 1;
        } else if text[i..].starts_with("<->") {
            out.push((i, Tok::BiArrow));
            i += 3;
        } else if text[i..].starts_with("->") {
            out.push((i, Tok::Arrow));
            i += 2;
        } else {
            let ch = text[i..].chars().next().unwrap_or('?');
            return Err(Error::Syntax {
                position: i,
                token: ch.to_string(),
                message: "unexpected character".into(),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

/// How identifiers map to species indices.
enum Registry<'a> {
    /// New names are appended in order of first appearance.
    Open(Vec<String>),
    /// Only the given names are allowed.
    Fixed(&'a [String]),
}

impl Registry<'_> {
    fn index(&mut self, name: &str, pos: usize) -> Result<usize> {
        match self {
            Registry::Open(names) => Ok(names.iter().position(|n| n == name).unwrap_or_else(|| {
                names.push(name.to_string());
                names.len() - 1
            })),
            Registry::Fixed(names) => names.iter().position(|n| n == name).ok_or_else(|| Error::Syntax {
                position: pos,
                token: name.to_string(),
                message: "unknown species".into(),
            }),
        }
    }
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    registry: Registry<'a>,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn error(&self, message: &str) -> Error {
        let (position, tok) = &self.toks[self.pos];
        Error::Syntax { position: *position, token: tok.text(), message: message.into() }
    }

    fn side(&mut self) -> Result<Complex> {
        if *self.peek() == Tok::Uint(0) {
            self.pos += 1;
            return Ok(Complex::zero());
        }
        let mut terms = Vec::new();
        loop {
            let coef = match self.peek() {
                Tok::Uint(0) => return Err(self.error("coefficients must be positive")),
                Tok::Uint(n) => {
                    let n = u32::try_from(*n).map_err(|_| self.error("coefficient out of range"))?;
                    self.pos += 1;
                    n
                }
                _ => 1,
            };
            let (at, tok) = self.toks[self.pos].clone();
            match tok {
                Tok::Ident(name) => {
                    self.pos += 1;
                    terms.push((self.registry.index(&name, at)?, coef));
                }
                _ => return Err(self.error("expected species name")),
            }
            if *self.peek() == Tok::Plus {
                self.pos += 1;
            } else {
                return Ok(Complex::from_terms(terms));
            }
        }
    }

    fn reaction(&mut self, out: &mut Vec<ReactionStep>) -> Result<()> {
        let lhs = self.side()?;
        let reversible = match self.peek() {
            Tok::Arrow => false,
            Tok::BiArrow => true,
            _ => return Err(self.error("expected `->` or `<->`")),
        };
        self.pos += 1;
        let rhs = self.side()?;
        if lhs == rhs {
            let names = match &self.registry {
                Registry::Open(n) => n.clone(),
                Registry::Fixed(n) => n.to_vec(),
            };
            return Err(Error::NullStep(lhs.display(&names).to_string()));
        }
        let step = ReactionStep::new(lhs, rhs);
        if reversible {
            let back = step.reversed();
            out.push(step);
            out.push(back);
        } else {
            out.push(step);
        }
        Ok(())
    }

    fn expect_end(&self) -> Result<()> {
        if *self.peek() == Tok::End {
            Ok(())
        } else {
            Err(self.error("unexpected token"))
        }
    }
}

/// Species in first-appearance order plus the parsed steps.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedMechanism {
    pub species: Vec<String>,
    pub steps: Vec<ReactionStep>,
}

pub fn parse_reactions(text: &str) -> Result<ParsedMechanism> {
    let mut p = Parser { toks: lex(text)?, pos: 0, registry: Registry::Open(Vec::new()) };
    let mut steps = Vec::new();
    p.reaction(&mut steps)?;
    while *p.peek() == Tok::Comma {
        p.pos += 1;
        p.reaction(&mut steps)?;
    }
    p.expect_end()?;
    let Registry::Open(species) = p.registry else { unreachable!() };
    Ok(ParsedMechanism { species, steps })
}

pub(crate) fn parse_side_with(text: &str, names: &[String]) -> Result<Complex> {
    let mut p = Parser { toks: lex(text)?, pos: 0, registry: Registry::Fixed(names) };
    let c = p.side()?;
    p.expect_end()?;
    Ok(c)
}

/// Parses a single `lhs -> rhs` reaction over a fixed species list.
pub fn parse_reaction_with(text: &str, names: &[String]) -> Result<ReactionStep> {
    let mut p = Parser { toks: lex(text)?, pos: 0, registry: Registry::Fixed(names) };
    let lhs = p.side()?;
    if *p.peek() != Tok::Arrow {
        return Err(p.error("expected `->`"));
    }
    p.pos += 1;
    let rhs = p.side()?;
    p.expect_end()?;
    Ok(ReactionStep::new(lhs, rhs))
}
