//! Chemical formulas: `(element count?)+` with parenthesised groups and an
//! optional charge suffix `^[n](+|-)`, e.g. `S2O8^2-`, `Ag(C2O4)^-`, `H2O`.
//! The bare symbol `e` denotes the electron and carries no atoms.

use std::fmt;

use crate::error::{Error, Result};

const ELEMENTS: &[&str] = &[
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar", "K",
    "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb",
    "Sr", "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn", "Sb", "Te", "I", "Xe", "Cs",
    "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta",
    "W", "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th", "Pa",
    "U", "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm", "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt",
    "Ds", "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
];

/// Elemental composition (first-appearance order) and net charge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Formula {
    pub text: String,
    pub composition: Vec<(String, u32)>,
    pub charge: i32,
}

impl Formula {
    pub fn count(&self, element: &str) -> u32 {
        self.composition.iter().find(|e| e.0 == element).map_or(0, |e| e.1)
    }

    /// An identifier usable in the reaction DSL: `^` becomes `_`, `+`/`-`
    /// become `p`/`m`, brackets are dropped. `Ag(C2O4)^-` -> `AgC2O4_m`.
    pub fn identifier(&self) -> String {
        self.text
            .chars()
            .filter_map(|c| match c {
                '(' | ')' => None,
                '^' => Some('_'),
                '+' => Some('p'),
                '-' => Some('m'),
                c => Some(c),
            })
            .collect()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

struct Cursor<'a> {
    text: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> Error {
        Error::FormulaSyntax { formula: self.text.to_string(), message: message.into() }
    }

    fn uint(&mut self) -> Option<u32> {
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.text[start..self.pos].parse().ok()).flatten()
    }

    fn group(&mut self, depth: usize, out: &mut Vec<(String, u32)>) -> Result<()> {
        let mut any = false;
        while self.pos < self.bytes.len() {
            let c = self.bytes[self.pos];
            if c == b'(' {
                self.pos += 1;
                let mut inner = Vec::new();
                self.group(depth + 1, &mut inner)?;
                if self.bytes.get(self.pos) != Some(&b')') {
                    return Err(self.err("unbalanced parenthesis"));
                }
                self.pos += 1;
                let mult = self.uint().unwrap_or(1);
                for (e, n) in inner {
                    add(out, &e, n * mult);
                }
                any = true;
            } else if c == b')' {
                if depth == 0 {
                    return Err(self.err("unbalanced parenthesis"));
                }
                break;
            } else if c.is_ascii_uppercase() || c == b'e' {
                let start = self.pos;
                self.pos += 1;
                if c != b'e' {
                    while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_lowercase() {
                        self.pos += 1;
                    }
                }
                let sym = &self.text[start..self.pos];
                let n = self.uint().unwrap_or(1);
                if sym == "e" {
                    // electron: charge only
                } else if ELEMENTS.contains(&sym) {
                    add(out, sym, n);
                } else {
                    return Err(Error::UnknownElement(sym.to_string()));
                }
                any = true;
            } else if c == b'^' {
                break;
            } else {
                return Err(self.err(format!("unexpected character `{}`", c as char)));
            }
        }
        if !any {
            return Err(self.err("empty formula or group"));
        }
        Ok(())
    }
}

fn add(out: &mut Vec<(String, u32)>, element: &str, n: u32) {
    match out.iter_mut().find(|e| e.0 == element) {
        Some(e) => e.1 += n,
        None => out.push((element.to_string(), n)),
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let text = text.trim();
    let mut cur = Cursor { text, bytes: text.as_bytes(), pos: 0 };
    let mut composition = Vec::new();
    cur.group(0, &mut composition)?;
    let mut charge = 0i32;
    if cur.pos < cur.bytes.len() {
        // at '^'
        cur.pos += 1;
        let n = cur.uint().unwrap_or(1) as i32;
        charge = match cur.bytes.get(cur.pos) {
            Some(b'+') => n,
            Some(b'-') => -n,
            _ => return Err(cur.err("charge must end with `+` or `-`")),
        };
        cur.pos += 1;
        if cur.pos != cur.bytes.len() {
            return Err(cur.err("trailing characters after charge"));
        }
    }
    Ok(Formula { text: text.to_string(), composition, charge })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_charged() {
        let f = parse_formula("H2O").unwrap();
        assert_eq!(f.composition, vec![("H".into(), 2), ("O".into(), 1)]);
        assert_eq!(f.charge, 0);
        let f = parse_formula("S2O8^2-").unwrap();
        assert_eq!(f.count("S"), 2);
        assert_eq!(f.count("O"), 8);
        assert_eq!(f.charge, -2);
        assert_eq!(parse_formula("Ag^+").unwrap().charge, 1);
        assert_eq!(parse_formula("Ag^2+").unwrap().charge, 2);
    }

    #[test]
    fn groups_multiply() {
        let f = parse_formula("Ag(C2O4)^-").unwrap();
        assert_eq!(f.composition, vec![("Ag".into(), 1), ("C".into(), 2), ("O".into(), 4)]);
        assert_eq!(f.charge, -1);
        let f = parse_formula("Ca(OH)2").unwrap();
        assert_eq!(f.count("O"), 2);
        assert_eq!(f.count("H"), 2);
    }

    #[test]
    fn electron_is_charge_only() {
        let f = parse_formula("e^-").unwrap();
        assert!(f.composition.is_empty());
        assert_eq!(f.charge, -1);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_formula("Xx2"), Err(Error::UnknownElement(s)) if s == "Xx"));
        assert!(matches!(parse_formula("H2O^2"), Err(Error::FormulaSyntax { .. })));
        assert!(matches!(parse_formula("(H2"), Err(Error::FormulaSyntax { .. })));
        assert!(matches!(parse_formula("h2"), Err(Error::FormulaSyntax { .. })));
        assert!(matches!(parse_formula(""), Err(Error::FormulaSyntax { .. })));
    }

    #[test]
    fn identifiers_are_dsl_safe() {
        assert_eq!(parse_formula("Ag(C2O4)^-").unwrap().identifier(), "AgC2O4_m");
        assert_eq!(parse_formula("Ag^2+").unwrap().identifier(), "Ag_2p");
    }
}
