use serde::Serialize;

use super::formula::{parse_formula, Formula};
use crate::error::Result;

/// Element counts and charge of each species: one row per element (in order
/// of first appearance) followed by a `charge` row, one column per species.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AtomicMatrix {
    pub rows: Vec<String>,
    pub species: Vec<String>,
    pub entries: Vec<Vec<i64>>,
}

impl AtomicMatrix {
    pub fn from_formulas(formulas: &[Formula]) -> Self {
        let mut rows: Vec<String> = Vec::new();
        for f in formulas {
            for (el, _) in &f.composition {
                if !rows.contains(el) {
                    rows.push(el.clone());
                }
            }
        }
        let mut entries: Vec<Vec<i64>> =
            rows.iter().map(|el| formulas.iter().map(|f| i64::from(f.count(el))).collect()).collect();
        entries.push(formulas.iter().map(|f| i64::from(f.charge)).collect());
        rows.push("charge".to_string());
        AtomicMatrix { rows, species: formulas.iter().map(|f| f.text.clone()).collect(), entries }
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    /// Number of element rows (all rows except charge).
    pub fn num_elements(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn column(&self, m: usize) -> Vec<i64> {
        self.entries.iter().map(|row| row[m]).collect()
    }

    /// `A x` for a dense vector of species counts.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        self.entries.iter().map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Parses every formula and builds the atomic matrix.
pub fn atomic_matrix<S: AsRef<str>>(formulas: &[S]) -> Result<AtomicMatrix> {
    let parsed = formulas.iter().map(|f| parse_formula(f.as_ref())).collect::<Result<Vec<_>>>()?;
    Ok(AtomicMatrix::from_formulas(&parsed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn water() {
        let a = atomic_matrix(&["H2", "O2", "H2O"]).unwrap();
        assert_eq!(a.rows, vec!["H", "O", "charge"]);
        assert_eq!(a.entries, vec![vec![2, 0, 2], vec![0, 2, 1], vec![0, 0, 0]]);
        assert_eq!(a.apply(&[0, 0, 2]), vec![4, 2, 0]);
    }

    #[test]
    fn electron_only() {
        let a = atomic_matrix(&["e^-"]).unwrap();
        assert_eq!(a.rows, vec!["charge"]);
        assert_eq!(a.entries, vec![vec![-1]]);
        assert_eq!(a.num_elements(), 0);
    }

    #[test]
    fn bad_formula() {
        assert!(atomic_matrix(&["Xq2"]).is_err());
    }
}
