//! Complex graph and structural indices: linkage classes, strong components,
//! terminality, deficiency and conservation laws.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_traits::ToPrimitive;
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::exact;
use crate::network::{reversible_pairs, Complex, ReactionNetwork};

/// The complex graph: one vertex per distinct complex, one edge per step.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexGraph {
    pub complexes: Vec<Complex>,
    /// `(from, to, step)`.
    pub edges: Vec<(usize, usize, usize)>,
}

impl ComplexGraph {
    pub fn num_vertices(&self) -> usize {
        self.complexes.len()
    }

    pub fn index_of(&self, c: &Complex) -> Option<usize> {
        self.complexes.iter().position(|x| x == c)
    }

    /// Linkage classes: connected components of the underlying undirected
    /// graph, each sorted, ordered by smallest vertex.
    pub fn linkage_classes(&self) -> Vec<Vec<usize>> {
        let n = self.num_vertices();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for &(u, v, _) in &self.edges {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for v in 0..n {
            let root = find(&mut parent, v);
            let k = *slot.entry(root).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[k].push(v);
        }
        classes
    }

    /// Strongly connected components with terminal flags, ordered by
    /// smallest vertex.
    pub fn strong_components(&self) -> Vec<StrongComponent> {
        let n = self.num_vertices();
        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, self.edges.len());
        let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
        for &(u, v, _) in &self.edges {
            g.add_edge(nodes[u], nodes[v], ());
        }
        let mut comps: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                v.sort_unstable();
                v
            })
            .collect();
        comps.sort_by_key(|c| c[0]);
        let mut which = vec![0; n];
        for (k, c) in comps.iter().enumerate() {
            for &v in c {
                which[v] = k;
            }
        }
        let mut terminal = vec![true; comps.len()];
        for &(u, v, _) in &self.edges {
            if which[u] != which[v] {
                terminal[which[u]] = false;
            }
        }
        comps
            .into_iter()
            .zip(terminal)
            .map(|(vertices, terminal)| StrongComponent { vertices, terminal })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongComponent {
    pub vertices: Vec<usize>,
    pub terminal: bool,
}

pub fn fhj_graph(net: &ReactionNetwork) -> ComplexGraph {
    let mut complexes: Vec<Complex> = Vec::new();
    let mut index: HashMap<Complex, usize> = HashMap::new();
    let mut vertex = |c: &Complex, complexes: &mut Vec<Complex>| -> usize {
        *index.entry(c.clone()).or_insert_with(|| {
            complexes.push(c.clone());
            complexes.len() - 1
        })
    };
    let mut edges = Vec::with_capacity(net.num_steps());
    for (r, step) in net.steps().iter().enumerate() {
        let u = vertex(&step.reactant, &mut complexes);
        let v = vertex(&step.product, &mut complexes);
        edges.push((u, v, r));
    }
    ComplexGraph { complexes, edges }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StructureReport {
    /// Number of complexes.
    pub n: usize,
    /// Number of linkage classes.
    pub l: usize,
    /// Rank of the stoichiometric matrix.
    pub s: usize,
    pub deficiency: i64,
    /// Number of reversible step pairs.
    pub p: usize,
    pub linkage_classes: Vec<Vec<usize>>,
    pub strong_components: Vec<StrongComponent>,
    pub weakly_reversible: bool,
}

pub fn stoichiometric_rank(net: &ReactionNetwork) -> usize {
    // rank(gamma) = rank(gamma^T); the step-major form is sparser to eliminate.
    exact::rank(&exact::transpose(&net.gamma().to_rows(), net.num_steps()))
}

pub fn structure_report(net: &ReactionNetwork) -> StructureReport {
    let graph = fhj_graph(net);
    report_for(net, &graph)
}

pub fn report_for(net: &ReactionNetwork, graph: &ComplexGraph) -> StructureReport {
    let linkage_classes = graph.linkage_classes();
    let strong_components = graph.strong_components();
    let n = graph.num_vertices();
    let l = linkage_classes.len();
    let s = stoichiometric_rank(net);
    let weakly_reversible = strong_components.len() == l;
    StructureReport {
        n,
        l,
        s,
        deficiency: n as i64 - l as i64 - s as i64,
        p: reversible_pairs(net).pairs.len(),
        linkage_classes,
        strong_components,
        weakly_reversible,
    }
}

/// A linear first integral: `weights . gamma = 0`, primitive integer, first
/// nonzero weight positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConservationLaw {
    pub weights: Vec<i64>,
}

impl ConservationLaw {
    pub fn evaluate(&self, c: &[f64]) -> f64 {
        self.weights.iter().zip(c).map(|(w, x)| *w as f64 * x).sum()
    }

    pub fn evaluate_counts(&self, x: &[i64]) -> i64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|w| *w >= 0)
    }
}

/// Basis of the left null space of gamma, from the reduced row echelon form
/// of gamma transposed. Its size is `M - S`.
pub fn conservation_laws(net: &ReactionNetwork) -> Vec<ConservationLaw> {
    let gt = exact::transpose(&net.gamma().to_rows(), net.num_steps());
    exact::kernel(&gt, net.num_species())
        .into_iter()
        .map(|v| ConservationLaw {
            weights: v
                .iter()
                .map(|x| x.to_i64().expect("conservation-law weight exceeds i64"))
                .collect(),
        })
        .collect()
}

/// GraphViz rendering of the complex graph. Vertices of terminal strong
/// components get `terminal=true` and a purple fill.
pub fn to_dot(net: &ReactionNetwork, graph: &ComplexGraph, rate_labels: Option<&[String]>) -> String {
    let comps = graph.strong_components();
    let mut terminal = vec![false; graph.num_vertices()];
    for c in &comps {
        for &v in &c.vertices {
            terminal[v] = c.terminal;
        }
    }
    let mut out = String::from("digraph fhj {\n  rankdir=LR;\n  node [shape=box, style=filled, fillcolor=white];\n");
    for (i, c) in graph.complexes.iter().enumerate() {
        let label = net.display_complex(c).to_string();
        if terminal[i] {
            let _ = writeln!(out, "  c{i} [label=\"{label}\", terminal=true, fillcolor=\"#c9a0dc\"];");
        } else {
            let _ = writeln!(out, "  c{i} [label=\"{label}\"];");
        }
    }
    for &(u, v, r) in &graph.edges {
        match rate_labels {
            Some(l) => {
                let _ = writeln!(out, "  c{u} -> c{v} [label=\"{}\"];", l[r]);
            }
            None => {
                let _ = writeln!(out, "  c{u} -> c{v} [label=\"k[{}]\"];", r + 1);
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{load_builtin, network_from_dsl};

    fn r1() -> ReactionNetwork {
        network_from_dsl("A + B -> 2 B, B -> A").unwrap()
    }

    #[test]
    fn r1_graph_and_report() {
        let net = r1();
        let g = fhj_graph(&net);
        let names: Vec<String> = g.complexes.iter().map(|c| net.display_complex(c).to_string()).collect();
        assert_eq!(names, vec!["A + B", "2 B", "B", "A"]);
        assert_eq!(g.edges.len(), 2);
        let rep = structure_report(&net);
        assert_eq!((rep.n, rep.l, rep.s, rep.deficiency), (4, 2, 1, 1));
        assert!(!rep.weakly_reversible);
    }

    #[test]
    fn envz_ompr_and_ross_deficiency() {
        let rep = structure_report(&load_builtin("envz-ompr").unwrap().network);
        assert_eq!((rep.n, rep.l, rep.s, rep.deficiency), (9, 3, 5, 1));
        let ross = load_builtin("ross-chain").unwrap().network;
        let g = fhj_graph(&ross);
        assert_eq!((g.num_vertices(), g.edges.len()), (9, 16));
        let rep = structure_report(&ross);
        assert_eq!((rep.n, rep.l, rep.s, rep.deficiency), (9, 1, 8, 0));
    }

    #[test]
    fn terminal_components() {
        let net = network_from_dsl("A -> B").unwrap();
        let comps = fhj_graph(&net).strong_components();
        assert_eq!(
            comps,
            vec![
                StrongComponent { vertices: vec![0], terminal: false },
                StrongComponent { vertices: vec![1], terminal: true }
            ]
        );
    }

    #[test]
    fn conservation_bases() {
        let ab = network_from_dsl("A <-> B").unwrap();
        assert_eq!(conservation_laws(&ab), vec![ConservationLaw { weights: vec![1, 1] }]);
        assert_eq!(conservation_laws(&r1()), vec![ConservationLaw { weights: vec![1, 1] }]);
        assert!(conservation_laws(&load_builtin("ross-chain").unwrap().network).is_empty());
        let envz = load_builtin("envz-ompr").unwrap().network;
        let laws = conservation_laws(&envz);
        assert_eq!(laws.len(), 2);
        for w in &laws {
            for r in 0..envz.num_steps() {
                let s: i64 = w.weights.iter().zip(envz.reaction_vector(r)).map(|(a, b)| a * b).sum();
                assert_eq!(s, 0);
            }
        }
    }

    #[test]
    fn dot_output() {
        let net = network_from_dsl("A -> B").unwrap();
        let dot = to_dot(&net, &fhj_graph(&net), None);
        assert_eq!(dot.matches(" -> ").count(), 1);
        assert_eq!(dot.matches("[label=\"A\"").count() + dot.matches("[label=\"B\"").count(), 2);

        let w = load_builtin("wegscheider").unwrap().network;
        let dot = to_dot(&w, &fhj_graph(&w), None);
        assert_eq!(dot.lines().filter(|l| l.trim_start().starts_with('c') && l.contains(" -> ")).count(), 4);

        let r5 = load_builtin("envz-ompr").unwrap().network;
        let dot = to_dot(&r5, &fhj_graph(&r5), None);
        assert_eq!(dot.lines().filter(|l| l.contains("[label=") && !l.contains(" -> ")).count(), 9);
        assert_eq!(dot.matches("terminal=true").count(), 3);
    }
}
