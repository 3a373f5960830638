//! Detailed balance of fully reversible mass-action networks.
//!
//! A positive stationary point with `k_p c^alpha_p = k_-p c^beta_p` for every
//! pair exists iff two families of monomial identities in the rate
//! coefficients hold: one circuit condition per independent cycle of the
//! complex graph (`P - N + L` of them) and `deficiency` spanning-forest
//! conditions.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact;
use crate::network::{reversible_pairs, RateAssignment, ReactionNetwork};
use crate::structure::{fhj_graph, ComplexGraph};

/// `prod k_i^lhs_i == prod k_j^rhs_j` with disjoint supports.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonomialEquation {
    pub lhs: BTreeMap<usize, u64>,
    pub rhs: BTreeMap<usize, u64>,
}

impl MonomialEquation {
    /// `log(lhs) - log(rhs)`.
    pub fn log_ratio(&self, k: &RateAssignment) -> f64 {
        let side = |m: &BTreeMap<usize, u64>| m.iter().map(|(&i, &e)| e as f64 * k[i].ln()).sum::<f64>();
        side(&self.lhs) - side(&self.rhs)
    }

    pub fn residual(&self, k: &RateAssignment) -> f64 {
        self.log_ratio(k).abs()
    }

    /// Same identity with the side holding the smallest step index on the
    /// right. Equal as a relation; only the presentation changes.
    pub fn canonical(&self) -> MonomialEquation {
        let min = |m: &BTreeMap<usize, u64>| m.keys().next().copied().unwrap_or(usize::MAX);
        if min(&self.lhs) < min(&self.rhs) {
            MonomialEquation { lhs: self.rhs.clone(), rhs: self.lhs.clone() }
        } else {
            self.clone()
        }
    }

    /// True when both describe the same identity, possibly with sides swapped.
    pub fn equivalent(&self, other: &MonomialEquation) -> bool {
        self == other || (self.lhs == other.rhs && self.rhs == other.lhs)
    }
}

fn write_side(f: &mut fmt::Formatter<'_>, side: &BTreeMap<usize, u64>) -> fmt::Result {
    if side.is_empty() {
        return f.write_str("1");
    }
    for (n, (&i, &e)) in side.iter().enumerate() {
        if n > 0 {
            f.write_str("*")?;
        }
        if e == 1 {
            write!(f, "k[{}]", i + 1)?;
        } else {
            write!(f, "k[{}]^{e}", i + 1)?;
        }
    }
    Ok(())
}

impl fmt::Display for MonomialEquation {
    /// Canonical text with 1-based step indices, e.g. `k[2]*k[3] == k[1]*k[4]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = self.canonical();
        write_side(f, &c.lhs)?;
        f.write_str(" == ")?;
        write_side(f, &c.rhs)
    }
}

/// An undirected complex-graph edge carried by a reversible pair, oriented
/// `from -> to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrientedPair {
    /// Index into [`crate::network::ReversiblePairs::pairs`].
    pub pair: usize,
    pub from: usize,
    pub to: usize,
    /// Step `from -> to`.
    pub forward: usize,
    /// Step `to -> from`.
    pub backward: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanningForest {
    /// `N - L` tree edges, in discovery order.
    pub edges: Vec<OrientedPair>,
    /// Pairs not in the forest, each closing one fundamental cycle.
    pub chords: Vec<OrientedPair>,
    /// BFS parent edge of every complex (`None` for roots).
    pub parent: Vec<Option<usize>>,
    pub depth: Vec<usize>,
}

struct PairGraph {
    graph: ComplexGraph,
    /// `(u, v, forward step u->v, backward step v->u)` per pair.
    pairs: Vec<(usize, usize, usize, usize)>,
}

fn pair_graph(net: &ReactionNetwork) -> Result<PairGraph> {
    let rp = reversible_pairs(net);
    if !rp.fully_reversible {
        let partner = rp.partner_map(net.num_steps());
        let r = partner.iter().position(|p| p.is_none()).unwrap_or(0);
        return Err(Error::NotReversible(r));
    }
    let graph = fhj_graph(net);
    let pairs = rp
        .pairs
        .iter()
        .map(|&(i, j)| {
            let (u, v, _) = graph.edges[i];
            (u, v, i, j)
        })
        .collect();
    Ok(PairGraph { graph, pairs })
}

fn orient(pg: &PairGraph, p: usize, from: usize) -> OrientedPair {
    let (u, v, i, j) = pg.pairs[p];
    if from == u {
        OrientedPair { pair: p, from: u, to: v, forward: i, backward: j }
    } else {
        OrientedPair { pair: p, from: v, to: u, forward: j, backward: i }
    }
}

fn forest_with_priority(pg: &PairGraph, priority: &[usize]) -> SpanningForest {
    let n = pg.graph.num_vertices();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (p, &(u, v, _, _)) in pg.pairs.iter().enumerate() {
        adj[u].push((v, p));
        adj[v].push((u, p));
    }
    for a in adj.iter_mut() {
        a.sort_by_key(|&(w, _)| priority[w]);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| priority[v]);

    let mut visited = vec![false; n];
    let mut in_tree = vec![false; pg.pairs.len()];
    let mut parent = vec![None; n];
    let mut depth = vec![0; n];
    let mut edges = Vec::new();
    for &root in &order {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            for &(y, p) in &adj[x] {
                if !visited[y] {
                    visited[y] = true;
                    in_tree[p] = true;
                    parent[y] = Some(edges.len());
                    depth[y] = depth[x] + 1;
                    edges.push(orient(pg, p, x));
                    queue.push_back(y);
                }
            }
        }
    }
    let chords = (0..pg.pairs.len())
        .filter(|&p| !in_tree[p])
        .map(|p| orient(pg, p, pg.pairs[p].0))
        .collect();
    SpanningForest { edges, chords, parent, depth }
}

/// Breadth-first spanning forest: each linkage class is rooted at its lowest
/// complex index and neighbours are visited in ascending index order.
pub fn spanning_forest(net: &ReactionNetwork) -> Result<SpanningForest> {
    let pg = pair_graph(net)?;
    let priority: Vec<usize> = (0..pg.graph.num_vertices()).collect();
    Ok(forest_with_priority(&pg, &priority))
}

/// Like [`spanning_forest`] with complexes ranked by `priority[v]` instead of
/// by index, which changes roots and visiting order.
pub fn spanning_forest_with_priority(net: &ReactionNetwork, priority: &[usize]) -> Result<SpanningForest> {
    let pg = pair_graph(net)?;
    if priority.len() != pg.graph.num_vertices() {
        return Err(Error::DimensionMismatch {
            what: "complex priorities",
            expected: pg.graph.num_vertices(),
            found: priority.len(),
        });
    }
    Ok(forest_with_priority(&pg, priority))
}

fn circuits_of(forest: &SpanningForest) -> Vec<MonomialEquation> {
    let up = |v: usize| forest.edges[forest.parent[v].expect("non-root")];
    forest
        .chords
        .iter()
        .map(|chord| {
            // Cycle: chord.from -> chord.to, then back to chord.from through the tree.
            let mut lhs = BTreeMap::from([(chord.forward, 1u64)]);
            let mut rhs = BTreeMap::from([(chord.backward, 1u64)]);
            let (mut a, mut b) = (chord.to, chord.from);
            let mut tail = Vec::new();
            while a != b {
                if forest.depth[a] >= forest.depth[b] {
                    // walking a towards the root: child -> parent is the backward step
                    let e = up(a);
                    lhs.insert(e.backward, 1);
                    rhs.insert(e.forward, 1);
                    a = e.from;
                } else {
                    // b's side is traversed parent -> child
                    let e = up(b);
                    tail.push(e);
                    b = e.from;
                }
            }
            for e in tail {
                lhs.insert(e.forward, 1);
                rhs.insert(e.backward, 1);
            }
            MonomialEquation { lhs, rhs }
        })
        .collect()
}

fn forest_conditions_of(net: &ReactionNetwork, graph: &ComplexGraph, forest: &SpanningForest) -> Vec<MonomialEquation> {
    let m = net.num_species();
    let cols: Vec<Vec<i64>> = forest
        .edges
        .iter()
        .map(|e| graph.complexes[e.to].difference(&graph.complexes[e.from], m))
        .collect();
    let rows = exact::transpose(&cols, m);
    exact::kernel(&rows, forest.edges.len())
        .into_iter()
        .map(|a| {
            let mut lhs = BTreeMap::new();
            let mut rhs = BTreeMap::new();
            for (e, x) in forest.edges.iter().zip(&a) {
                let Some(p) = x.abs().to_u64().filter(|p| *p > 0) else {
                    continue;
                };
                if x.is_positive() {
                    lhs.insert(e.forward, p);
                    rhs.insert(e.backward, p);
                } else {
                    lhs.insert(e.backward, p);
                    rhs.insert(e.forward, p);
                }
            }
            MonomialEquation { lhs, rhs }
        })
        .collect()
}

/// One identity per fundamental cycle: product of the coefficients along the
/// cycle equals the product against it.
pub fn circuit_conditions(net: &ReactionNetwork) -> Result<Vec<MonomialEquation>> {
    Ok(conditions(net)?.circuit)
}

/// One identity per kernel basis vector of the forest-edge reaction vectors.
pub fn forest_conditions(net: &ReactionNetwork) -> Result<Vec<MonomialEquation>> {
    Ok(conditions(net)?.spanning_forest)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Conditions {
    pub forest: SpanningForest,
    pub circuit: Vec<MonomialEquation>,
    pub spanning_forest: Vec<MonomialEquation>,
}

/// Both condition families from one forest.
pub fn conditions(net: &ReactionNetwork) -> Result<Conditions> {
    let pg = pair_graph(net)?;
    let priority: Vec<usize> = (0..pg.graph.num_vertices()).collect();
    Ok(conditions_for(net, &pg, &priority))
}

/// Conditions from the forest of [`spanning_forest_with_priority`].
pub fn conditions_with_priority(net: &ReactionNetwork, priority: &[usize]) -> Result<Conditions> {
    let pg = pair_graph(net)?;
    if priority.len() != pg.graph.num_vertices() {
        return Err(Error::DimensionMismatch {
            what: "complex priorities",
            expected: pg.graph.num_vertices(),
            found: priority.len(),
        });
    }
    Ok(conditions_for(net, &pg, priority))
}

fn conditions_for(net: &ReactionNetwork, pg: &PairGraph, priority: &[usize]) -> Conditions {
    let forest = forest_with_priority(pg, priority);
    Conditions {
        circuit: circuits_of(&forest),
        spanning_forest: forest_conditions_of(net, &pg.graph, &forest),
        forest,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetailedBalanceReport {
    pub holds: bool,
    pub circuit_residuals: Vec<f64>,
    pub forest_residuals: Vec<f64>,
    /// `|log(k_p c^alpha_p) - log(k_-p c^beta_p)|` per pair at the supplied point.
    pub stationary_residuals: Option<Vec<f64>>,
}

impl DetailedBalanceReport {
    pub fn max_residual(&self) -> f64 {
        self.circuit_residuals
            .iter()
            .chain(&self.forest_residuals)
            .chain(self.stationary_residuals.iter().flatten())
            .fold(0.0, |a, &b| a.max(b))
    }
}

fn log_monomial(net: &ReactionNetwork, k: f64, c: &[f64], step: usize, reactant: bool) -> f64 {
    let s = &net.steps()[step];
    let complex = if reactant { &s.reactant } else { &s.product };
    k.ln() + complex.terms().iter().map(|&(i, e)| e as f64 * c[i].ln()).sum::<f64>()
}

/// Evaluates all conditions at `k`; holds iff every residual is at most `tol`.
/// With `stationary`, additionally checks `k_p c^alpha_p = k_-p c^beta_p` for
/// every pair at that positive point.
pub fn check_detailed_balance(
    net: &ReactionNetwork,
    k: &RateAssignment,
    tol: f64,
    stationary: Option<&[f64]>,
) -> Result<DetailedBalanceReport> {
    k.check_len(net)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let conds = conditions(net)?;
    let circuit_residuals: Vec<f64> = conds.circuit.iter().map(|e| e.residual(k)).collect();
    let forest_residuals: Vec<f64> = conds.spanning_forest.iter().map(|e| e.residual(k)).collect();
    let stationary_residuals = match stationary {
        None => None,
        Some(c) => {
            if c.len() != net.num_species() {
                return Err(Error::DimensionMismatch {
                    what: "concentrations",
                    expected: net.num_species(),
                    found: c.len(),
                });
            }
            if let Some((i, &v)) = c.iter().enumerate().find(|(_, v)| !(**v > 0.0)) {
                return Err(Error::InvalidArgument(format!(
                    "stationary point must be positive; c[{i}] = {v}"
                )));
            }
            let pairs = reversible_pairs(net).pairs;
            Some(
                pairs
                    .iter()
                    .map(|&(i, j)| {
                        (log_monomial(net, k[i], c, i, true) - log_monomial(net, k[j], c, j, true)).abs()
                    })
                    .collect(),
            )
        }
    };
    let holds = circuit_residuals
        .iter()
        .chain(&forest_residuals)
        .chain(stationary_residuals.iter().flatten())
        .all(|r| *r <= tol);
    Ok(DetailedBalanceReport { holds, circuit_residuals, forest_residuals, stationary_residuals })
}

/// Rate coefficients that are detailed balanced at `c_star`: forward
/// coefficients are kept, each backward one is set to
/// `k_p (c*)^(alpha_p - beta_p)`.
pub fn balanced_rates(net: &ReactionNetwork, forward: &RateAssignment, c_star: &[f64]) -> Result<RateAssignment> {
    forward.check_len(net)?;
    let rp = reversible_pairs(net);
    if !rp.fully_reversible {
        let partner = rp.partner_map(net.num_steps());
        return Err(Error::NotReversible(partner.iter().position(|p| p.is_none()).unwrap_or(0)));
    }
    let mut k = forward.values().to_vec();
    for &(i, j) in &rp.pairs {
        let g = net.reaction_vector(i);
        let log = g.iter().zip(c_star).map(|(&gi, c)| -(gi as f64) * c.ln()).sum::<f64>();
        k[j] = k[i] * log.exp();
    }
    RateAssignment::new(k)
}
