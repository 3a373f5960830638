//! Generation of all elementary steps compatible with atom and charge balance.

use serde::Serialize;

use super::atomic::AtomicMatrix;
use super::formula::Formula;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::network::{build_network, Complex, ReactionNetwork, ReactionStep, Species};

/// All complexes of total molecularity one or two over `m` species:
/// `X_i` for every `i`, then `2 X_i`, then `X_i + X_j` with `i < j`.
pub fn reactant_complexes(m: usize) -> Vec<Complex> {
    let mut out = Vec::with_capacity(2 * m + m * m.saturating_sub(1) / 2);
    out.extend((0..m).map(Complex::single));
    out.extend((0..m).map(|i| Complex::from_terms([(i, 2)])));
    for i in 0..m {
        for j in i + 1..m {
            out.push(Complex::from_terms([(i, 1), (j, 1)]));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ElementaryOptions {
    /// Upper bound on the total molecularity of a product complex. Required
    /// when some species contains no atoms (e.g. the electron).
    pub max_product_molecularity: Option<u32>,
    pub execution: Execution,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ElementaryStep {
    pub reactant: Vec<u32>,
    pub product: Vec<u32>,
}

impl ElementaryStep {
    pub fn to_step(&self) -> ReactionStep {
        ReactionStep::new(Complex::from_dense(&self.reactant), Complex::from_dense(&self.product))
    }
}

struct Search<'a> {
    a: &'a AtomicMatrix,
    /// Cap on the total molecularity of the product.
    cap: Option<u32>,
    /// Per element row: index of the last species containing the element.
    last: Vec<Option<usize>>,
}

impl Search<'_> {
    fn bound(&self, m: usize, remaining: &[i64]) -> u32 {
        let mut b = u32::MAX;
        for e in 0..self.a.num_elements() {
            let coeff = self.a.entries[e][m];
            if coeff > 0 {
                b = b.min((remaining[e] / coeff) as u32);
            }
        }
        if let Some(c) = self.cap {
            b = b.min(c);
        }
        b
    }

    fn dfs(&self, m: usize, x: &mut Vec<u32>, remaining: &mut Vec<i64>, total: u32, out: &mut Vec<Vec<u32>>) {
        let ns = self.a.num_species();
        if m == ns {
            if remaining.iter().all(|&r| r == 0) {
                out.push(x.clone());
            }
            return;
        }
        let mut hi = self.bound(m, remaining);
        if let Some(c) = self.cap {
            hi = hi.min(c - total);
        }
        let col = self.a.column(m);
        for n in 0..=hi {
            x[m] = n;
            let ok = (0..self.a.num_elements()).all(|e| self.last[e] != Some(m) || remaining[e] == i64::from(n) * col[e]);
            if ok {
                for (r, c) in remaining.iter_mut().zip(&col) {
                    *r -= i64::from(n) * c;
                }
                self.dfs(m + 1, x, remaining, total + n, out);
                for (r, c) in remaining.iter_mut().zip(&col) {
                    *r += i64::from(n) * c;
                }
            }
        }
        x[m] = 0;
    }
}

/// Every step `alpha -> x` with `alpha` a reactant complex of molecularity at
/// most two, `x != alpha` a nonnegative integer vector and `A alpha = A x`.
/// Steps are ordered by reactant complex (as in [`reactant_complexes`]), then
/// lexicographically by product.
pub fn elementary_reactions(a: &AtomicMatrix, opts: &ElementaryOptions) -> Result<Vec<ElementaryStep>> {
    let ns = a.num_species();
    if opts.max_product_molecularity.is_none() {
        if let Some(m) = (0..ns).find(|&m| (0..a.num_elements()).all(|e| a.entries[e][m] == 0)) {
            return Err(Error::UnboundedEnumeration(m));
        }
    }
    let last =
        (0..a.num_elements()).map(|e| (0..ns).rev().find(|&m| a.entries[e][m] != 0)).collect();
    let search = Search { a, cap: opts.max_product_molecularity, last };
    let complexes = reactant_complexes(ns);
    let per = opts.execution.map(complexes.len(), |i| {
        let alpha = complexes[i].to_dense(ns);
        let alpha_i: Vec<i64> = alpha.iter().map(|&v| i64::from(v)).collect();
        let mut remaining = a.apply(&alpha_i);
        let mut sols = Vec::new();
        search.dfs(0, &mut vec![0; ns], &mut remaining, 0, &mut sols);
        sols.into_iter()
            .filter(|x| *x != alpha)
            .map(|product| ElementaryStep { reactant: alpha.clone(), product })
            .collect::<Vec<_>>()
    });
    Ok(per.into_iter().flatten().collect())
}

/// Wraps generated steps into a network whose species are named by the
/// DSL identifiers of their formulas. Species that take part in no step are
/// dropped.
pub fn elementary_network(formulas: &[Formula], steps: &[ElementaryStep]) -> Result<ReactionNetwork> {
    let ns = formulas.len();
    let mut used = vec![false; ns];
    for s in steps {
        for m in 0..ns {
            used[m] |= s.reactant[m] > 0 || s.product[m] > 0;
        }
    }
    let keep: Vec<usize> = (0..ns).filter(|&m| used[m]).collect();
    let species = keep
        .iter()
        .map(|&m| Species { name: formulas[m].identifier(), formula: Some(formulas[m].clone()) })
        .collect();
    let project = |v: &[u32]| Complex::from_dense(&keep.iter().map(|&m| v[m]).collect::<Vec<_>>());
    let steps = steps.iter().map(|s| ReactionStep::new(project(&s.reactant), project(&s.product))).collect();
    build_network(species, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stoichiometry::atomic_matrix;

    #[test]
    fn complex_counts() {
        assert_eq!(reactant_complexes(1).len(), 2);
        assert_eq!(reactant_complexes(3).len(), 9);
        assert_eq!(reactant_complexes(16).len(), 152);
    }

    #[test]
    fn water_steps() {
        let a = atomic_matrix(&["H2", "O2", "H2O"]).unwrap();
        let steps = elementary_reactions(&a, &ElementaryOptions::default()).unwrap();
        let from_2h2o: Vec<_> = steps.iter().filter(|s| s.reactant == vec![0, 0, 2]).collect();
        assert_eq!(from_2h2o.len(), 1);
        assert_eq!(from_2h2o[0].product, vec![2, 1, 0]);
        for s in &steps {
            let r: Vec<i64> = s.reactant.iter().map(|&v| v.into()).collect();
            let p: Vec<i64> = s.product.iter().map(|&v| v.into()).collect();
            assert_eq!(a.apply(&r), a.apply(&p));
        }
    }

    #[test]
    fn single_species_has_no_steps() {
        let a = atomic_matrix(&["H2"]).unwrap();
        assert!(elementary_reactions(&a, &ElementaryOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn electrons_need_a_cap() {
        let a = atomic_matrix(&["Fe^3+", "Fe^2+", "e^-"]).unwrap();
        assert!(matches!(
            elementary_reactions(&a, &ElementaryOptions::default()),
            Err(Error::UnboundedEnumeration(2))
        ));
        let opts = ElementaryOptions { max_product_molecularity: Some(2), ..Default::default() };
        let steps = elementary_reactions(&a, &opts).unwrap();
        assert!(steps.iter().any(|s| s.reactant == vec![1, 0, 1] && s.product == vec![0, 1, 0]));
        assert!(steps.iter().all(|s| s.product.iter().sum::<u32>() <= 2));
    }

    #[test]
    fn sequential_and_parallel_agree() {
        let a = atomic_matrix(&["H2", "O2", "H2O", "H", "O", "OH", "HO2", "H2O2"]).unwrap();
        let seq = elementary_reactions(&a, &ElementaryOptions { execution: Execution::Sequential, ..Default::default() });
        let par = elementary_reactions(&a, &ElementaryOptions { execution: Execution::Parallel, ..Default::default() });
        assert_eq!(seq.unwrap(), par.unwrap());
    }
}
