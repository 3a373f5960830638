//! Absolute concentration robustness (Shinar–Feinberg).
//!
//! A deficiency-one network with a positive stationary point is robust in a
//! species if two complexes in nonterminal strong components differ only in
//! that species.

use serde::Serialize;

use crate::deterministic::{stationary_points, StationaryOptions};
use crate::error::Result;
use crate::network::{Complex, RateAssignment, ReactionNetwork};
use crate::structure::{fhj_graph, report_for, ComplexGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessPair {
    /// Complex indices in the complex graph, `first < second`.
    pub first: usize,
    pub second: usize,
    /// The only species in which the two complexes differ.
    pub species: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcrVerdict {
    RobustSpeciesFound,
    TheoremInapplicable,
    NoPositivePointFound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AcrReport {
    pub deficiency: i64,
    pub positive_point: Option<Vec<f64>>,
    pub witness_pairs: Vec<WitnessPair>,
    pub robust_species: Vec<usize>,
    pub verdict: AcrVerdict,
}

fn pairs_in(net: &ReactionNetwork, graph: &ComplexGraph) -> Vec<WitnessPair> {
    let m = net.num_species();
    let mut nonterminal: Vec<usize> = graph
        .strong_components()
        .into_iter()
        .filter(|c| !c.terminal)
        .flat_map(|c| c.vertices)
        .collect();
    nonterminal.sort_unstable();
    let mut out = Vec::new();
    for (a, &u) in nonterminal.iter().enumerate() {
        for &v in &nonterminal[a + 1..] {
            let d = graph.complexes[u].difference(&graph.complexes[v], m);
            let mut support = d.iter().enumerate().filter(|(_, x)| **x != 0);
            if let (Some((s, _)), None) = (support.next(), support.next()) {
                out.push(WitnessPair { first: u, second: v, species: s });
            }
        }
    }
    out
}

/// All pairs of complexes in nonterminal strong components whose difference
/// has exactly one nonzero coordinate, ordered by `(first, second)`.
pub fn nonterminal_pairs(net: &ReactionNetwork) -> Vec<(Complex, Complex, usize)> {
    let graph = fhj_graph(net);
    pairs_in(net, &graph)
        .into_iter()
        .map(|p| (graph.complexes[p.first].clone(), graph.complexes[p.second].clone(), p.species))
        .collect()
}

/// Runs the test. Solver failures while looking for a positive stationary
/// point give [`AcrVerdict::NoPositivePointFound`], not an error.
pub fn acr_test(
    net: &ReactionNetwork,
    k: &RateAssignment,
    c0: &[f64],
    opts: &StationaryOptions,
) -> Result<AcrReport> {
    k.check_len(net)?;
    let graph = fhj_graph(net);
    let deficiency = report_for(net, &graph).deficiency;
    let mut report = AcrReport {
        deficiency,
        positive_point: None,
        witness_pairs: Vec::new(),
        robust_species: Vec::new(),
        verdict: AcrVerdict::TheoremInapplicable,
    };
    if deficiency != 1 {
        return Ok(report);
    }
    let opts = StationaryOptions { positivity: true, ..opts.clone() };
    report.positive_point = match stationary_points(net, k, c0, &opts) {
        Ok(points) => points.into_iter().next().map(|p| p.c),
        Err(crate::Error::NoConvergence) => None,
        Err(e) => return Err(e),
    };
    report.witness_pairs = pairs_in(net, &graph);
    if report.positive_point.is_none() {
        report.verdict = AcrVerdict::NoPositivePointFound;
        return Ok(report);
    }
    let mut species: Vec<usize> = report.witness_pairs.iter().map(|p| p.species).collect();
    species.sort_unstable();
    species.dedup();
    if !species.is_empty() {
        report.robust_species = species;
        report.verdict = AcrVerdict::RobustSpeciesFound;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{load_builtin, network_from_dsl};

    #[test]
    fn r1_is_robust_in_a() {
        let b = load_builtin("wegscheider-irrev").unwrap();
        let rep = acr_test(&b.network, &b.rates, &[1.0, 1.0], &StationaryOptions::default()).unwrap();
        assert_eq!(rep.verdict, AcrVerdict::RobustSpeciesFound);
        assert_eq!(rep.robust_species, vec![0]);
        let names = b.network.species_names();
        let pairs = nonterminal_pairs(&b.network);
        assert_eq!(pairs.len(), 1);
        let (u, v, s) = &pairs[0];
        assert_eq!(b.network.display_complex(u).to_string(), "A + B");
        assert_eq!(b.network.display_complex(v).to_string(), "B");
        assert_eq!(names[*s], "A");
    }

    #[test]
    fn r1_never_pairs_a_plus_2b_with_b() {
        let net = network_from_dsl("A + 2 B -> 3 B, B -> A").unwrap();
        for (u, v, _) in nonterminal_pairs(&net) {
            let d = u.difference(&v, 2);
            assert_eq!(d.iter().filter(|x| **x != 0).count(), 1);
        }
        assert!(nonterminal_pairs(&net).is_empty());
    }

    #[test]
    fn envz_ompr_is_robust_in_yp() {
        let b = load_builtin("envz-ompr").unwrap();
        let rep = acr_test(&b.network, &b.rates, &b.initial, &StationaryOptions::default()).unwrap();
        assert_eq!(rep.verdict, AcrVerdict::RobustSpeciesFound, "{rep:?}");
        let yp = b.network.species_index("Yp").unwrap();
        assert!(rep.robust_species.contains(&yp));
        let graph = fhj_graph(&b.network);
        let xt_yp = b.network.parse_complex("XT + Yp").unwrap();
        let xt = b.network.parse_complex("XT").unwrap();
        let (i, j) = (graph.index_of(&xt_yp).unwrap(), graph.index_of(&xt).unwrap());
        assert!(rep.witness_pairs.iter().any(|p| (p.first, p.second) == (i.min(j), i.max(j))));
    }

    #[test]
    fn deficiency_zero_is_inapplicable() {
        let b = load_builtin("ross-chain").unwrap();
        let rep = acr_test(&b.network, &b.rates, &b.initial, &StationaryOptions::default()).unwrap();
        assert_eq!(rep.verdict, AcrVerdict::TheoremInapplicable);
        assert!(rep.robust_species.is_empty());
        assert!(nonterminal_pairs(&network_from_dsl("A -> B").unwrap()).is_empty());
    }

    #[test]
    fn no_positive_point() {
        // a0 + b0 < k2/k1: only the boundary point (a0 + b0, 0) exists.
        let b = load_builtin("wegscheider-irrev").unwrap();
        let k = RateAssignment::new(vec![1.0, 5.0]).unwrap();
        let rep = acr_test(&b.network, &k, &[1.0, 1.0], &StationaryOptions::default()).unwrap();
        assert_eq!(rep.verdict, AcrVerdict::NoPositivePointFound);
        assert!(rep.robust_species.is_empty());
    }
}
