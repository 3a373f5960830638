use crnkit::deterministic::{rhs, MassActionSystem};
use crnkit::network::{build_network, Complex, ReactionStep, Species};
use crnkit::stochastic::ssa_direct;
use crnkit::stoichiometry::lp::{int, lp_feasible, rational_rows, verify_certificate, Bound, LpOutcome};
use crnkit::stoichiometry::{cycles, decompositions, reactant_complexes, DecompositionOptions};
use crnkit::structure::{conservation_laws, structure_report};
use crnkit::{Error, RateAssignment, ReactionNetwork};
use num_rational::BigRational;
use proptest::prelude::*;

fn network() -> impl Strategy<Value = ReactionNetwork> {
    (2usize..5).prop_flat_map(|m| {
        let complex = proptest::collection::vec(0u32..3, m);
        proptest::collection::vec((complex.clone(), complex), 1..7).prop_filter_map("degenerate", move |steps| {
            let mut seen = Vec::new();
            for (a, b) in &steps {
                if a != b && !seen.contains(&(a.clone(), b.clone())) {
                    seen.push((a.clone(), b.clone()));
                }
            }
            let species = (0..m).map(|i| Species::named(format!("X{i}"))).collect();
            let steps = seen.into_iter().map(|(a, b)| ReactionStep::new(Complex::from_dense(&a), Complex::from_dense(&b))).collect();
            build_network(species, steps).ok()
        })
    })
}

/// All nonnegative integer vectors of length `n` with entry sum at most `total`.
fn vectors(n: usize, total: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for v in &out {
            let used: u64 = v.iter().sum();
            for x in 0..=total - used {
                let mut u = v.clone();
                u.push(x);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

fn apply(gamma: &[Vec<i64>], x: &[u64]) -> Vec<i64> {
    gamma.iter().map(|row| row.iter().zip(x).map(|(g, v)| g * *v as i64).sum()).collect()
}

fn small_system() -> impl Strategy<Value = (Vec<Vec<i64>>, Vec<i64>)> {
    (1usize..4, 1usize..5).prop_flat_map(|(m, r)| {
        (
            proptest::collection::vec(proptest::collection::vec(-2i64..3, r), m),
            proptest::collection::vec(0u64..3, r),
            proptest::bool::ANY,
            proptest::collection::vec(-2i64..3, m),
        )
            .prop_map(|(g, x0, planted, w)| {
                let w = if planted { apply(&g, &x0) } else { w };
                (g, w)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn deficiency_nonnegative(net in network()) {
        let rep = structure_report(&net);
        prop_assert!(rep.deficiency >= 0);
        prop_assert!(rep.strong_components.len() >= rep.l);
    }

    #[test]
    fn conservation_laws_annihilate_gamma(net in network()) {
        let gamma = net.gamma().to_rows();
        for law in conservation_laws(&net) {
            for r in 0..net.num_steps() {
                let s: i64 = law.weights.iter().zip(&gamma).map(|(w, row)| w * row[r]).sum();
                prop_assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn rhs_orthogonal_to_conservation_laws(net in network(), c in proptest::collection::vec(0.0f64..3.0, 4)) {
        let c = &c[..net.num_species()];
        let k = RateAssignment::ones(net.num_steps());
        let f = rhs(&net, &k, c).unwrap();
        let scale = 1.0 + f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for law in conservation_laws(&net) {
            prop_assert!(law.evaluate(&f).abs() <= 1e-12 * scale * law.weights.iter().map(|w| w.abs() as f64).sum::<f64>());
        }
        let sys = MassActionSystem::new(&net, &k).unwrap();
        prop_assert_eq!(sys.rhs(c), f);
    }

    #[test]
    fn ssa_keeps_counts_nonnegative(net in network(), seed in 0u64..1000) {
        // bounded molecule numbers keep the run short
        prop_assume!(net.steps().iter().all(|s| s.product.order() <= s.reactant.order()));
        let x0 = vec![5i64; net.num_species()];
        let k = RateAssignment::ones(net.num_steps());
        let tr = ssa_direct(&net, &k, &x0, 0.5, seed).unwrap();
        prop_assert!(tr.counts.iter().flatten().all(|&v| v >= 0));
        let laws = conservation_laws(&net);
        for s in &tr.counts {
            for l in &laws {
                prop_assert_eq!(l.evaluate_counts(s), l.evaluate_counts(&x0));
            }
        }
    }

    #[test]
    fn lp_agrees_with_certificates((g, w) in small_system()) {
        let a = rational_rows(&g);
        let b: Vec<BigRational> = w.iter().map(|&v| int(v)).collect();
        let bounds = vec![Bound::nonnegative(); g[0].len()];
        match lp_feasible(&a, &b, &bounds) {
            LpOutcome::Feasible(x) => {
                prop_assert!(x.iter().all(|v| *v >= int(0)));
                for (row, bi) in a.iter().zip(&b) {
                    prop_assert_eq!(&row.iter().zip(&x).map(|(p, q)| p * q).sum::<BigRational>(), bi);
                }
            }
            LpOutcome::Infeasible(z) => prop_assert!(verify_certificate(&a, &b, &bounds, &z)),
        }
    }

    #[test]
    fn minimal_decompositions_match_brute_force((g, w) in small_system()) {
        let r = g[0].len();
        // For w = 0 every solution is a cycle, and no decomposition is minimal.
        let zero = w.iter().all(|&v| v == 0);
        let brute: Vec<Vec<u64>> =
            vectors(r, 6).into_iter().filter(|x| !zero && x.iter().any(|&v| v > 0) && apply(&g, x) == w).collect();
        let brute_min: Vec<Vec<u64>> = brute
            .iter()
            .filter(|x| !brute.iter().any(|y| y != *x && x.iter().zip(y).all(|(a, b)| a >= b)))
            .cloned()
            .collect();
        match decompositions(&g, &w, &DecompositionOptions::minimal()) {
            Ok(d) => {
                let mut exact: Vec<Vec<u64>> = d.solutions.iter().map(|s| s.multipliers.clone()).collect();
                for x in &exact {
                    prop_assert_eq!(apply(&g, x), w.clone());
                }
                for x in &exact {
                    prop_assert!(!exact.iter().any(|y| y != x && x.iter().zip(y).all(|(a, b)| a >= b)));
                }
                exact.retain(|x| x.iter().sum::<u64>() <= 6);
                exact.sort();
                let mut bm = brute_min.clone();
                bm.sort();
                prop_assert_eq!(exact, bm);
            }
            Err(Error::Infeasible { .. }) => prop_assert!(brute.is_empty()),
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        }
        let c = cycles(&g, None).unwrap();
        let brute_cycle = vectors(r, 6).into_iter().any(|x| x.iter().any(|&v| v > 0) && apply(&g, &x).iter().all(|&v| v == 0));
        if brute_cycle {
            prop_assert!(c.exists);
        }
        prop_assert_eq!(c.exists, !c.minimal_cycles.is_empty());
    }

    #[test]
    fn reactant_complex_count(m in 1usize..40) {
        prop_assert_eq!(reactant_complexes(m).len(), 2 * m + m * (m - 1) / 2);
    }
}
