//! Decomposition of an overall reaction `w` into elementary steps: the
//! nonnegative integer solutions of `gamma x = w`.
//!
//! Minimal solutions are found with the completion procedure of Contejean and
//! Devie applied to the homogeneous system `[gamma | -w] (x, z) = 0`; the
//! minimal solutions with `z = 1` are the minimal decompositions and those with
//! `z = 0` the minimal cycles.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;

use super::lp::{int, lp_feasible, rational_rows, Bound, LpOutcome};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::stochastic::rng::Rng;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DecompositionSolution {
    pub multipliers: Vec<u64>,
    pub is_cycle: bool,
}

#[derive(Clone, Debug, Default)]
pub struct DecompositionOptions {
    pub max_solutions: Option<usize>,
    /// Return only decompositions that contain no cycle. Otherwise every
    /// decomposition with at most `max_total` step occurrences is returned.
    pub minimal_only: bool,
    pub max_total: Option<u64>,
}

impl DecompositionOptions {
    pub fn minimal() -> Self {
        DecompositionOptions { minimal_only: true, ..Default::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decompositions {
    pub solutions: Vec<DecompositionSolution>,
    /// Enumeration stopped at `max_solutions`.
    pub truncated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CycleReport {
    pub exists: bool,
    pub minimal_cycles: Vec<DecompositionSolution>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Preprocessing {
    /// Steps used by every decomposition of the LP relaxation.
    pub forced_steps: Vec<usize>,
    /// Steps used by no decomposition of the LP relaxation.
    pub excluded_steps: Vec<usize>,
}

fn check_dims(gamma: &[Vec<i64>], w: &[i64]) -> Result<usize> {
    let r = gamma.first().map_or(0, Vec::len);
    if let Some(row) = gamma.iter().find(|row| row.len() != r) {
        return Err(Error::DimensionMismatch { what: "stoichiometric matrix row", expected: r, found: row.len() });
    }
    if w.len() != gamma.len() {
        return Err(Error::DimensionMismatch { what: "overall reaction", expected: gamma.len(), found: w.len() });
    }
    Ok(r)
}

fn relaxation(gamma: &[Vec<i64>], w: &[i64], bounds: &[Bound]) -> LpOutcome {
    let a = rational_rows(gamma);
    let b: Vec<BigRational> = w.iter().map(|&v| int(v)).collect();
    lp_feasible(&a, &b, bounds)
}

/// `x >= y` componentwise.
fn dominates(x: &[u64], y: &[u64]) -> bool {
    x.iter().zip(y).all(|(a, b)| a >= b)
}

/// Minimal nonzero nonnegative solutions of `b v = 0` whose last coordinate
/// is at most `last_cap`, by the Contejean–Devie completion procedure.
/// The search stops once more than `limit` solutions satisfying `counted`
/// are known; the flag reports whether that happened.
fn hilbert_basis(
    b: &[Vec<i64>],
    ncols: usize,
    last_cap: u64,
    limit: Option<usize>,
    counted: impl Fn(&[u64]) -> bool,
) -> (Vec<Vec<u64>>, bool) {
    let image = |v: &[u64]| -> Vec<i64> { b.iter().map(|row| row.iter().zip(v).map(|(a, x)| a * *x as i64).sum()).collect() };
    let cols: Vec<Vec<i64>> = (0..ncols).map(|j| b.iter().map(|row| row[j]).collect()).collect();
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut frontier: Vec<(Vec<u64>, Vec<i64>)> = (0..ncols)
        .filter(|&j| j + 1 < ncols || last_cap >= 1)
        .map(|j| {
            let mut v = vec![0u64; ncols];
            v[j] = 1;
            let img = cols[j].clone();
            (v, img)
        })
        .collect();
    while !frontier.is_empty() {
        let mut rest = Vec::new();
        for (v, img) in frontier {
            if img.iter().all(|&x| x == 0) {
                if !basis.iter().any(|s| dominates(&v, s)) {
                    basis.push(v);
                    if limit.is_some_and(|l| basis.iter().filter(|s| counted(s)).count() > l) {
                        return (basis, true);
                    }
                }
            } else {
                rest.push((v, img));
            }
        }
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut next = Vec::new();
        for (v, img) in &rest {
            for j in 0..ncols {
                if j + 1 == ncols && v[j] >= last_cap {
                    continue;
                }
                let dot: i64 = img.iter().zip(&cols[j]).map(|(a, c)| a * c).sum();
                if dot >= 0 {
                    continue;
                }
                let mut u = v.clone();
                u[j] += 1;
                if basis.iter().any(|s| dominates(&u, s)) || !seen.insert(u.clone()) {
                    continue;
                }
                let uimg = img.iter().zip(&cols[j]).map(|(a, c)| a + c).collect();
                next.push((u, uimg));
            }
        }
        debug_assert!(next.iter().all(|(u, i)| image(u) == *i));
        frontier = next;
    }
    (basis, false)
}

fn canonical(mut sols: Vec<DecompositionSolution>) -> Vec<DecompositionSolution> {
    sols.sort_by(|a, b| {
        let (sa, sb) = (a.multipliers.iter().sum::<u64>(), b.multipliers.iter().sum::<u64>());
        sa.cmp(&sb).then_with(|| b.multipliers.cmp(&a.multipliers))
    });
    sols
}

/// Nonnegative integer solutions of `gamma x = w`, `x != 0`.
pub fn decompositions(gamma: &[Vec<i64>], w: &[i64], opts: &DecompositionOptions) -> Result<Decompositions> {
    let r = check_dims(gamma, w)?;
    if let LpOutcome::Infeasible(certificate) = relaxation(gamma, w, &vec![Bound::nonnegative(); r]) {
        return Err(Error::Infeasible { certificate });
    }
    let homog: Vec<Vec<i64>> = gamma.iter().zip(w).map(|(row, &wi)| row.iter().copied().chain([-wi]).collect()).collect();
    let limit = if opts.minimal_only { opts.max_solutions } else { None };
    let (basis, stopped) = hilbert_basis(&homog, r + 1, 1, limit, |v| v[r] == 1 && v[..r].iter().any(|&x| x > 0));
    let mut decs: Vec<Vec<u64>> = Vec::new();
    let mut cycles: Vec<Vec<u64>> = Vec::new();
    for mut v in basis {
        let z = v.pop().unwrap();
        if z == 1 {
            if v.iter().any(|&x| x > 0) {
                decs.push(v);
            }
        } else {
            cycles.push(v);
        }
    }
    let mut sols: Vec<DecompositionSolution> =
        decs.iter().map(|x| DecompositionSolution { multipliers: x.clone(), is_cycle: false }).collect();
    if !opts.minimal_only {
        if !cycles.is_empty() && opts.max_total.is_none() {
            return Err(Error::InvalidArgument(
                "the steps can form a cycle, so the decompositions are infinite; set a bound on their size".into(),
            ));
        }
        let cap = opts.max_total.unwrap_or(u64::MAX);
        let mut all: HashSet<Vec<u64>> = decs.iter().filter(|x| x.iter().sum::<u64>() <= cap).cloned().collect();
        let mut layer: Vec<Vec<u64>> = all.iter().cloned().collect();
        while !layer.is_empty() {
            let mut next = Vec::new();
            for x in &layer {
                for c in &cycles {
                    let y: Vec<u64> = x.iter().zip(c).map(|(a, b)| a + b).collect();
                    if y.iter().sum::<u64>() <= cap && all.insert(y.clone()) {
                        next.push(y);
                    }
                }
            }
            layer = next;
        }
        sols = all.into_iter().map(|multipliers| DecompositionSolution { multipliers, is_cycle: false }).collect();
    }
    let mut sols = canonical(sols);
    let truncated = stopped || opts.max_solutions.is_some_and(|l| sols.len() > l);
    if let Some(l) = opts.max_solutions {
        sols.truncate(l);
    }
    Ok(Decompositions { solutions: sols, truncated })
}

/// Whether the steps can form a cycle (`gamma x = 0` with `x >= 0`, `x != 0`)
/// and the cycles that are not sums of two cycles.
pub fn cycles(gamma: &[Vec<i64>], max_cycles: Option<usize>) -> Result<CycleReport> {
    let r = check_dims(gamma, &vec![0; gamma.len()])?;
    let mut a = rational_rows(gamma);
    a.push(vec![BigRational::one(); r]);
    let mut b = vec![int(0); gamma.len()];
    b.push(BigRational::one());
    let exists = lp_feasible(&a, &b, &vec![Bound::nonnegative(); r]).is_feasible();
    let minimal_cycles = if exists {
        let (basis, _) = hilbert_basis(gamma, r, u64::MAX, max_cycles, |_| true);
        canonical(basis.into_iter().map(|multipliers| DecompositionSolution { multipliers, is_cycle: true }).collect())
    } else {
        Vec::new()
    };
    Ok(CycleReport { exists, minimal_cycles })
}

/// Steps that every (resp. no) nonnegative rational solution of
/// `gamma x = w` uses.
pub fn preprocess(gamma: &[Vec<i64>], w: &[i64], execution: Execution) -> Result<Preprocessing> {
    let r = check_dims(gamma, w)?;
    if let LpOutcome::Infeasible(certificate) = relaxation(gamma, w, &vec![Bound::nonnegative(); r]) {
        return Err(Error::Infeasible { certificate });
    }
    let verdicts = execution.map(r, |j| {
        let mut bounds = vec![Bound::nonnegative(); r];
        bounds[j] = Bound::at_least(BigRational::one());
        let excluded = !relaxation(gamma, w, &bounds).is_feasible();
        bounds[j] = Bound::fixed(int(0));
        let forced = !relaxation(gamma, w, &bounds).is_feasible();
        (forced, excluded)
    });
    Ok(Preprocessing {
        forced_steps: (0..r).filter(|&j| verdicts[j].0).collect(),
        excluded_steps: (0..r).filter(|&j| verdicts[j].1).collect(),
    })
}

/// Randomised greedy search: from `x = 0`, repeatedly adds a step chosen at
/// random among those that bring `gamma x` strictly closer to `w` in the
/// 1-norm. Decompositions found in `attempts` tries are returned, minus those
/// that dominate another one found. No completeness guarantee.
pub fn heuristic_decompositions(
    gamma: &[Vec<i64>],
    w: &[i64],
    attempts: usize,
    seed: u64,
) -> Result<Vec<DecompositionSolution>> {
    let r = check_dims(gamma, w)?;
    let mut rng = Rng::new(seed);
    let mut found: HashSet<Vec<u64>> = HashSet::new();
    for _ in 0..attempts {
        let mut x = vec![0u64; r];
        let mut rem: Vec<i64> = w.to_vec();
        loop {
            let norm: i64 = rem.iter().map(|v| v.abs()).sum();
            if norm == 0 {
                if x.iter().any(|&v| v > 0) {
                    found.insert(x);
                }
                break;
            }
            let candidates: Vec<usize> = (0..r)
                .filter(|&j| rem.iter().zip(gamma).map(|(v, row)| (v - row[j]).abs()).sum::<i64>() < norm)
                .collect();
            if candidates.is_empty() {
                break;
            }
            let j = candidates[((rng.uniform() * candidates.len() as f64) as usize).min(candidates.len() - 1)];
            x[j] += 1;
            for (v, row) in rem.iter_mut().zip(gamma) {
                *v -= row[j];
            }
        }
    }
    let all: Vec<Vec<u64>> = found.into_iter().collect();
    let keep = all
        .iter()
        .filter(|x| !all.iter().any(|y| y != *x && dominates(x, y)))
        .map(|x| DecompositionSolution { multipliers: x.clone(), is_cycle: false })
        .collect();
    Ok(canonical(keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::network_from_dsl;

    fn gamma_of(dsl: &str) -> Vec<Vec<i64>> {
        network_from_dsl(dsl).unwrap().gamma().to_rows()
    }

    #[test]
    fn chain_with_backstep() {
        let g = gamma_of("A -> B, B -> C, B -> A");
        let d = decompositions(&g, &[-1, 0, 1], &DecompositionOptions::minimal()).unwrap();
        assert_eq!(d.solutions, vec![DecompositionSolution { multipliers: vec![1, 1, 0], is_cycle: false }]);
        assert!(!d.truncated);
        let c = cycles(&g, None).unwrap();
        assert!(c.exists);
        assert_eq!(c.minimal_cycles.iter().map(|s| s.multipliers.clone()).collect::<Vec<_>>(), vec![vec![1, 0, 1]]);
        let p = preprocess(&g, &[-1, 0, 1], Execution::Sequential).unwrap();
        assert_eq!(p.forced_steps, vec![0, 1]);
        assert!(p.excluded_steps.is_empty());
        let all = DecompositionOptions { minimal_only: false, max_total: Some(4), ..Default::default() };
        let d = decompositions(&g, &[-1, 0, 1], &all).unwrap();
        assert_eq!(d.solutions.len(), 2);
        assert_eq!(d.solutions[1].multipliers, vec![2, 1, 1]);
    }

    #[test]
    fn single_step_target() {
        let g = gamma_of("A -> B, B -> C");
        let d = decompositions(&g, &[-1, 1, 0], &DecompositionOptions::minimal()).unwrap();
        assert_eq!(d.solutions[0].multipliers, vec![1, 0]);
        assert_eq!(d.solutions.len(), 1);
        assert!(!cycles(&g, None).unwrap().exists);
    }

    #[test]
    fn infeasible_target() {
        let g = gamma_of("A -> B");
        let Err(Error::Infeasible { certificate }) = decompositions(&g, &[0, 1], &DecompositionOptions::minimal()) else {
            panic!("expected infeasibility")
        };
        assert_eq!(certificate.len(), 2);
        assert!(matches!(preprocess(&g, &[0, 1], Execution::Sequential), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn zero_target() {
        let g = gamma_of("A -> B, B -> A");
        let p = preprocess(&g, &[0, 0], Execution::Sequential).unwrap();
        assert!(p.forced_steps.is_empty());
        assert!(decompositions(&g, &[0, 0], &DecompositionOptions::minimal()).unwrap().solutions.is_empty());
        let c = cycles(&g, None).unwrap();
        assert_eq!(c.minimal_cycles[0].multipliers, vec![1, 1]);
    }

    #[test]
    fn wegscheider_cycles() {
        let g = gamma_of("A <-> B, 2 A <-> 2 B");
        let c: Vec<Vec<u64>> = cycles(&g, None).unwrap().minimal_cycles.into_iter().map(|s| s.multipliers).collect();
        assert!(c.contains(&vec![1, 1, 0, 0]));
        assert!(c.contains(&vec![0, 0, 1, 1]));
        assert!(c.contains(&vec![2, 0, 0, 1]));
    }

    #[test]
    fn truncation_flag() {
        let g = gamma_of("A -> B, A -> C, C -> B, A -> D, D -> B");
        let d = decompositions(&g, &[-1, 1, 0, 0], &DecompositionOptions { max_solutions: Some(2), ..DecompositionOptions::minimal() }).unwrap();
        assert_eq!(d.solutions.len(), 2);
        assert!(d.truncated);
    }

    #[test]
    fn heuristic_finds_subset() {
        let g = gamma_of("A -> B, A -> C, C -> B, B -> A");
        let exact = decompositions(&g, &[-1, 1, 0], &DecompositionOptions::minimal()).unwrap().solutions;
        let h = heuristic_decompositions(&g, &[-1, 1, 0], 50, 1).unwrap();
        assert!(!h.is_empty());
        for s in &h {
            assert!(exact.contains(s));
        }
    }
}
