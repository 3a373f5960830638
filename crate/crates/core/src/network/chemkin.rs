//! Import of a CHEMKIN mechanism subset.
//!
//! Accepted: an optional `ELEMENTS` block (skipped), a `SPECIES` block and a
//! `REACTIONS` block, each closed by `END`. Keywords may be abbreviated to
//! four letters. `!` starts a comment. Reaction lines are
//! `equation [A b E]` where `=` or `<=>` makes a reversible pair and `=>` an
//! irreversible step. Third bodies (`M`), pressure dependence (`(+M)`) and
//! auxiliary keyword lines are rejected.

use serde::Serialize;

use super::{build_network, Complex, ReactionNetwork, ReactionStep, Species};
use crate::error::{Error, Result};

/// Modified Arrhenius parameters `(A, b, E)` as written in the file. Stored,
/// not interpreted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arrhenius {
    pub pre_exponential: f64,
    pub temperature_exponent: f64,
    pub activation_energy: f64,
}

#[derive(Clone, Copy, PartialEq)]
enum Block {
    None,
    Elements,
    Species,
    Reactions,
}

fn keyword(word: &str) -> Option<Block> {
    let w = word.to_ascii_uppercase();
    let matches = |full: &str| w.len() >= 4 && full.starts_with(&w);
    if matches("ELEMENTS") {
        Some(Block::Elements)
    } else if matches("SPECIES") {
        Some(Block::Species)
    } else if matches("REACTIONS") {
        Some(Block::Reactions)
    } else {
        None
    }
}

fn parse_side(text: &str, species: &[String], line: usize) -> Result<Complex> {
    let err = |message: String| Error::LineSyntax { line, message };
    let mut terms = Vec::new();
    for raw in text.split('+') {
        let term = raw.trim();
        if term.is_empty() {
            return Err(err(format!("empty term in `{text}`")));
        }
        if term.eq_ignore_ascii_case("M") {
            return Err(Error::Unsupported(format!(
                "line {line}: third-body and pressure-dependent reactions are not supported"
            )));
        }
        if let Some(i) = species.iter().position(|s| s == term) {
            terms.push((i, 1));
            continue;
        }
        let digits = term.chars().take_while(|c| c.is_ascii_digit()).count();
        let (coef, name) = term.split_at(digits);
        let coef: u32 = if coef.is_empty() {
            1
        } else {
            coef.parse().map_err(|_| err(format!("bad coefficient in `{term}`")))?
        };
        if coef == 0 {
            return Err(err(format!("zero coefficient in `{term}`")));
        }
        let i = species
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| err(format!("unknown species `{name}`")))?;
        terms.push((i, coef));
    }
    Ok(Complex::from_terms(terms))
}

pub fn import_chemkin_subset(text: &str) -> Result<ReactionNetwork> {
    let mut block = Block::None;
    let mut species: Vec<String> = Vec::new();
    let mut saw_species = false;
    let mut steps = Vec::new();
    let mut meta = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let line = raw.split('!').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words = line.split_whitespace();
        let first = words.next().unwrap_or("");
        if block == Block::None {
            match keyword(first) {
                Some(b) => {
                    block = b;
                    if b == Block::Species {
                        saw_species = true;
                    }
                    // Content may follow the keyword on the same line.
                    let rest: Vec<&str> = words.collect();
                    if b == Block::Species {
                        for w in rest {
                            if w.eq_ignore_ascii_case("END") {
                                block = Block::None;
                                break;
                            }
                            species.push(w.to_string());
                        }
                    } else if rest.iter().any(|w| w.eq_ignore_ascii_case("END")) {
                        block = Block::None;
                    }
                    continue;
                }
                None => {
                    return Err(Error::LineSyntax {
                        line: line_no,
                        message: format!("expected a block keyword, found `{first}`"),
                    })
                }
            }
        }
        if first.eq_ignore_ascii_case("END") {
            block = Block::None;
            continue;
        }
        match block {
            Block::Elements => {}
            Block::Species => {
                for w in line.split_whitespace() {
                    if w.eq_ignore_ascii_case("END") {
                        block = Block::None;
                        break;
                    }
                    if species.iter().any(|s| s == w) {
                        return Err(Error::LineSyntax {
                            line: line_no,
                            message: format!("species `{w}` listed twice"),
                        });
                    }
                    species.push(w.to_string());
                }
            }
            Block::Reactions => {
                if !saw_species {
                    return Err(Error::MissingBlock("SPECIES"));
                }
                let (eq_steps, arr) = parse_reaction_line(line, &species, line_no)?;
                let first_new = steps.len();
                steps.extend(eq_steps);
                meta.push(arr);
                if steps.len() - first_new == 2 {
                    meta.push(None);
                }
            }
            Block::None => unreachable!(),
        }
    }
    if !saw_species {
        return Err(Error::MissingBlock("SPECIES"));
    }
    if block != Block::None {
        return Err(Error::MissingBlock("END"));
    }
    let net = build_network(species.into_iter().map(Species::named).collect(), steps)?;
    Ok(net.with_arrhenius(meta))
}

fn parse_reaction_line(
    line: &str,
    species: &[String],
    line_no: usize,
) -> Result<(Vec<ReactionStep>, Option<Arrhenius>)> {
    let words: Vec<&str> = line.split_whitespace().collect();
    if words.iter().any(|w| w.contains('/')) {
        return Err(Error::Unsupported(format!("line {line_no}: auxiliary keyword lines are not supported")));
    }
    if words.first().is_some_and(|w| w.eq_ignore_ascii_case("DUPLICATE") || w.eq_ignore_ascii_case("DUP")) {
        return Err(Error::Unsupported(format!("line {line_no}: DUPLICATE is not supported")));
    }
    let numeric = words.iter().rev().take_while(|w| w.parse::<f64>().is_ok()).count();
    let (eq_words, nums) = if numeric >= 3 {
        words.split_at(words.len() - 3)
    } else {
        (&words[..], &[][..])
    };
    let equation: String = eq_words.concat();
    if equation.contains("(+") {
        return Err(Error::Unsupported(format!(
            "line {line_no}: pressure-dependent reactions are not supported"
        )));
    }
    let (lhs, rhs, reversible) = if let Some((l, r)) = equation.split_once("<=>") {
        (l, r, true)
    } else if let Some((l, r)) = equation.split_once("=>") {
        (l, r, false)
    } else if let Some((l, r)) = equation.split_once('=') {
        (l, r, true)
    } else {
        return Err(Error::LineSyntax { line: line_no, message: format!("no `=` in `{equation}`") });
    };
    let reactant = parse_side(lhs, species, line_no)?;
    let product = parse_side(rhs, species, line_no)?;
    if reactant == product {
        return Err(Error::NullStep(equation));
    }
    let arr = if nums.len() == 3 {
        let v: Vec<f64> = nums.iter().map(|w| w.parse().unwrap()).collect();
        Some(Arrhenius { pre_exponential: v[0], temperature_exponent: v[1], activation_energy: v[2] })
    } else {
        None
    };
    let step = ReactionStep::new(reactant, product);
    let steps = if reversible { vec![step.clone(), step.reversed()] } else { vec![step] };
    Ok((steps, arr))
}
