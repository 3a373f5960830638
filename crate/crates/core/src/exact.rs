//! Exact rational linear algebra on sparse rows.
//!
//! Rank, row bases and kernels used for deficiency, conservation laws and
//! spanning-forest conditions. Nothing here touches floating point.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// A sparse row: `(column, value)` pairs sorted by column, no explicit zeros.
pub type SparseRow = Vec<(usize, BigRational)>;

pub fn sparse_from_ints(row: &[i64]) -> SparseRow {
    row.iter()
        .enumerate()
        .filter(|(_, v)| **v != 0)
        .map(|(j, v)| (j, BigRational::from_integer(BigInt::from(*v))))
        .collect()
}

/// `a - factor * b`, both sorted.
fn axpy(a: &SparseRow, factor: &BigRational, b: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
        let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
        if take_a {
            out.push(a[i].clone());
            i += 1;
        } else if take_b {
            out.push((b[j].0, -(factor * &b[j].1)));
            j += 1;
        } else {
            let v = &a[i].1 - factor * &b[j].1;
            if !v.is_zero() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

/// Row echelon form built one row at a time.
///
/// Each stored row has a leading (smallest) column that no other stored row
/// leads with, and its leading coefficient is one.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<SparseRow>,
    lead: BTreeMap<usize, usize>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// Reduces `row` against the stored rows and keeps the remainder if it is
    /// nonzero. Returns whether the row was independent.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        loop {
            let Some((col, val)) = row.first().cloned() else {
                return false;
            };
            match self.lead.get(&col) {
                Some(&k) => row = axpy(&row, &val, &self.rows[k]),
                None => {
                    let inv = val.recip();
                    for e in row.iter_mut() {
                        e.1 = &e.1 * &inv;
                    }
                    self.lead.insert(col, self.rows.len());
                    self.rows.push(row);
                    return true;
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.lead.keys().copied().collect()
    }

    /// Back-substitutes into reduced row echelon form; rows ordered by pivot.
    pub fn into_reduced(self) -> Vec<(usize, SparseRow)> {
        let mut rows: Vec<(usize, SparseRow)> = self
            .lead
            .iter()
            .map(|(&c, &k)| (c, self.rows[k].clone()))
            .collect();
        // Eliminate each pivot column from all rows above it, last pivot first.
        for p in (0..rows.len()).rev() {
            let (pc, prow) = rows[p].clone();
            for row in rows.iter_mut().take(p) {
                if let Ok(pos) = row.1.binary_search_by_key(&pc, |e| e.0) {
                    let f = row.1[pos].1.clone();
                    row.1 = axpy(&row.1, &f, &prow);
                }
            }
        }
        rows
    }
}

/// Rank of an integer matrix given as rows.
pub fn rank(rows: &[Vec<i64>]) -> usize {
    let mut e = Echelon::new();
    for r in rows {
        e.insert(sparse_from_ints(r));
    }
    e.rank()
}

/// Indices of the rows that are independent of all earlier rows.
pub fn independent_rows(rows: &[Vec<i64>]) -> Vec<usize> {
    let mut e = Echelon::new();
    rows.iter()
        .enumerate()
        .filter(|(_, r)| e.insert(sparse_from_ints(r)))
        .map(|(i, _)| i)
        .collect()
}

/// Scales a rational vector to a primitive integer vector whose first nonzero
/// entry is positive.
pub fn primitive_integer(v: &[BigRational]) -> Vec<BigInt> {
    let lcm = v
        .iter()
        .filter(|x| !x.is_zero())
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut ints: Vec<BigInt> = v
        .iter()
        .map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in ints.iter_mut() {
            *x = &*x / &g;
        }
    }
    if ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in ints.iter_mut() {
            *x = -&*x;
        }
    }
    ints
}

/// Primitive-integer basis of `{x : rows · x = 0}`, read off the reduced row
/// echelon form: one vector per free column, in ascending column order.
pub fn kernel(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<BigInt>> {
    let mut e = Echelon::new();
    for r in rows {
        debug_assert_eq!(r.len(), ncols);
        e.insert(sparse_from_ints(r));
    }
    let reduced = e.into_reduced();
    let pivots: BTreeMap<usize, &SparseRow> = reduced.iter().map(|(c, r)| (*c, r)).collect();
    (0..ncols)
        .filter(|c| !pivots.contains_key(c))
        .map(|free| {
            let mut v = vec![BigRational::zero(); ncols];
            v[free] = BigRational::one();
            for (&pc, row) in &pivots {
                if let Ok(pos) = row.binary_search_by_key(&free, |e| e.0) {
                    v[pc] = -row[pos].1.clone();
                }
            }
            primitive_integer(&v)
        })
        .collect()
}

pub fn transpose(rows: &[Vec<i64>], ncols: usize) -> Vec<Vec<i64>> {
    (0..ncols).map(|j| rows.iter().map(|r| r[j]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rank_of_dependent_rows() {
        assert_eq!(rank(&[vec![1, 2], vec![2, 4]]), 1);
        assert_eq!(rank(&[vec![1, 2], vec![0, 1]]), 2);
        assert_eq!(rank(&[vec![0, 0]]), 0);
    }

    #[test]
    fn independent_row_selection() {
        let m = vec![vec![-1, 1, 0], vec![1, -1, 0], vec![0, 1, -1]];
        assert_eq!(independent_rows(&m), vec![0, 2]);
    }

    #[test]
    fn kernel_is_primitive_and_normalized() {
        // x - y = 0 and 2y - 2z = 0 -> span (1,1,1)
        let k = kernel(&[vec![1, -1, 0], vec![0, 2, -2]], 3);
        assert_eq!(k, vec![ints(&[1, 1, 1])]);
        let k = kernel(&[vec![2, 3]], 2);
        assert_eq!(k, vec![ints(&[3, -2])]);
    }

    #[test]
    fn kernel_of_zero_matrix_is_identity() {
        let k = kernel(&[vec![0, 0]], 2);
        assert_eq!(k, vec![ints(&[1, 0]), ints(&[0, 1])]);
    }

    #[test]
    fn kernel_vectors_annihilate() {
        let m = vec![vec![1, 2, 3, 4], vec![2, -1, 0, 1], vec![3, 1, 3, 5]];
        let k = kernel(&m, 4);
        assert_eq!(k.len(), 4 - rank(&m));
        for v in &k {
            for r in &m {
                let s: BigInt = r.iter().zip(v).map(|(a, b)| BigInt::from(*a) * b).sum();
                assert!(s.is_zero());
            }
        }
    }
}
