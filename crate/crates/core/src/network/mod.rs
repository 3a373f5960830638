//! Reaction mechanisms: species, complexes, steps and the molecularity
//! matrices derived from them.

mod builtin;
mod chemkin;
mod complex;
mod dsl;

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

pub use builtin::{available_models, load_builtin, Builtin, ROSS_RATES};
pub use chemkin::{import_chemkin_subset, Arrhenius};
pub use complex::{Complex, ComplexDisplay};
pub use dsl::{parse_reaction_with, parse_reactions, ParsedMechanism};

use crate::error::{Error, Result};
use crate::stoichiometry::Formula;

#[derive(Clone, Debug, PartialEq)]
pub struct Species {
    pub name: String,
    pub formula: Option<Formula>,
}

impl Species {
    pub fn named(name: impl Into<String>) -> Self {
        Species { name: name.into(), formula: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ReactionStep {
    pub reactant: Complex,
    pub product: Complex,
}

impl ReactionStep {
    pub fn new(reactant: Complex, product: Complex) -> Self {
        ReactionStep { reactant, product }
    }

    pub fn reversed(&self) -> Self {
        ReactionStep { reactant: self.product.clone(), product: self.reactant.clone() }
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Copy + Default> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![T::default(); rows * cols] }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let data = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Matrix { rows: rows.len(), cols, data }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }
}

/// A validated mechanism with its molecularity (`alpha`, `beta`) and
/// stoichiometric (`gamma = beta - alpha`) matrices, species by rows and
/// steps by columns.
#[derive(Clone, Debug)]
pub struct ReactionNetwork {
    species: Vec<Species>,
    names: Vec<String>,
    steps: Vec<ReactionStep>,
    alpha: Matrix<u32>,
    beta: Matrix<u32>,
    gamma: Matrix<i64>,
    arrhenius: Vec<Option<Arrhenius>>,
}

impl ReactionNetwork {
    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn species_names(&self) -> &[String] {
        &self.names
    }

    pub fn species_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn steps(&self) -> &[ReactionStep] {
        &self.steps
    }

    /// Number of species (M).
    pub fn num_species(&self) -> usize {
        self.species.len()
    }

    /// Number of directed steps (R).
    pub fn num_steps(&self) -> usize {
        self.steps.len()
    }

    pub fn alpha(&self) -> &Matrix<u32> {
        &self.alpha
    }

    pub fn beta(&self) -> &Matrix<u32> {
        &self.beta
    }

    pub fn gamma(&self) -> &Matrix<i64> {
        &self.gamma
    }

    pub fn arrhenius(&self) -> &[Option<Arrhenius>] {
        &self.arrhenius
    }

    pub(crate) fn with_arrhenius(mut self, meta: Vec<Option<Arrhenius>>) -> Self {
        debug_assert_eq!(meta.len(), self.steps.len());
        self.arrhenius = meta;
        self
    }

    pub fn display_complex<'a>(&'a self, c: &'a Complex) -> ComplexDisplay<'a> {
        c.display(&self.names)
    }

    pub fn display_step(&self, r: usize) -> String {
        let s = &self.steps[r];
        format!("{} -> {}", self.display_complex(&s.reactant), self.display_complex(&s.product))
    }

    /// Reaction vector of step `r` (a column of gamma).
    pub fn reaction_vector(&self, r: usize) -> Vec<i64> {
        self.gamma.column(r)
    }

    /// Parses a complex written in the reaction DSL against this network's species.
    pub fn parse_complex(&self, text: &str) -> Result<Complex> {
        dsl::parse_side_with(text, &self.names)
    }
}

impl fmt::Display for ReactionNetwork {
    /// Canonical DSL text; consecutive reverse steps are merged into `<->`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut r = 0;
        let mut first = true;
        while r < self.steps.len() {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            let s = &self.steps[r];
            let merged = r + 1 < self.steps.len() && self.steps[r + 1] == s.reversed();
            let arrow = if merged { "<->" } else { "->" };
            write!(
                f,
                "{} {arrow} {}",
                self.display_complex(&s.reactant),
                self.display_complex(&s.product)
            )?;
            r += if merged { 2 } else { 1 };
        }
        Ok(())
    }
}

/// Assembles the matrices of a mechanism.
///
/// Species keep the given order; steps keep input order. Every species must
/// occur in some step.
pub fn build_network(species: Vec<Species>, steps: Vec<ReactionStep>) -> Result<ReactionNetwork> {
    if steps.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let names: Vec<String> = species.iter().map(|s| s.name.clone()).collect();
    let m = species.len();
    let mut seen: HashMap<&ReactionStep, usize> = HashMap::new();
    let mut used = vec![false; m];
    for step in &steps {
        if step.reactant == step.product {
            return Err(Error::NullStep(step.reactant.display(&names).to_string()));
        }
        if seen.insert(step, 0).is_some() {
            return Err(Error::DuplicateStep(format!(
                "{} -> {}",
                step.reactant.display(&names),
                step.product.display(&names)
            )));
        }
        for &(s, _) in step.reactant.terms().iter().chain(step.product.terms()) {
            if s >= m {
                return Err(Error::InvalidArgument(format!("species index {s} out of range")));
            }
            used[s] = true;
        }
    }
    if let Some(s) = used.iter().position(|u| !u) {
        return Err(Error::UnusedSpecies(names[s].clone()));
    }
    let r = steps.len();
    let mut alpha = Matrix::zeros(m, r);
    let mut beta = Matrix::zeros(m, r);
    let mut gamma = Matrix::zeros(m, r);
    for (j, step) in steps.iter().enumerate() {
        for &(s, c) in step.reactant.terms() {
            alpha.set(s, j, c);
        }
        for &(s, c) in step.product.terms() {
            beta.set(s, j, c);
        }
    }
    for i in 0..m {
        for j in 0..r {
            gamma.set(i, j, i64::from(beta.get(i, j)) - i64::from(alpha.get(i, j)));
        }
    }
    Ok(ReactionNetwork { species, names, steps, alpha, beta, gamma, arrhenius: vec![None; r] })
}

/// Parses DSL text and builds the network in one go.
pub fn network_from_dsl(text: &str) -> Result<ReactionNetwork> {
    let parsed = parse_reactions(text)?;
    build_network(parsed.species.into_iter().map(Species::named).collect(), parsed.steps)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReversiblePairs {
    /// `(forward, backward)` step indices with `forward < backward`.
    pub pairs: Vec<(usize, usize)>,
    pub fully_reversible: bool,
}

impl ReversiblePairs {
    /// Partner of every step, if it has one.
    pub fn partner_map(&self, num_steps: usize) -> Vec<Option<usize>> {
        let mut v = vec![None; num_steps];
        for &(i, j) in &self.pairs {
            v[i] = Some(j);
            v[j] = Some(i);
        }
        v
    }
}

/// Matches every step with its reverse step, if present.
pub fn reversible_pairs(net: &ReactionNetwork) -> ReversiblePairs {
    let index: HashMap<&ReactionStep, usize> =
        net.steps.iter().enumerate().map(|(i, s)| (s, i)).collect();
    let mut paired = vec![false; net.steps.len()];
    let mut pairs = Vec::new();
    for (i, step) in net.steps.iter().enumerate() {
        if paired[i] {
            continue;
        }
        if let Some(&j) = index.get(&step.reversed()) {
            if j > i && !paired[j] {
                paired[i] = true;
                paired[j] = true;
                pairs.push((i, j));
            }
        }
    }
    let fully_reversible = paired.iter().all(|&p| p);
    ReversiblePairs { pairs, fully_reversible }
}

/// Strictly positive, finite rate coefficients, one per step.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateAssignment(Vec<f64>);

impl RateAssignment {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some((index, &value)) =
            values.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v > 0.0))
        {
            return Err(Error::NonpositiveRate { index, value });
        }
        Ok(RateAssignment(values))
    }

    pub fn ones(r: usize) -> Self {
        RateAssignment(vec![1.0; r])
    }

    pub fn for_network(net: &ReactionNetwork, values: Vec<f64>) -> Result<Self> {
        if values.len() != net.num_steps() {
            return Err(Error::DimensionMismatch {
                what: "rate coefficients",
                expected: net.num_steps(),
                found: values.len(),
            });
        }
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn check_len(&self, net: &ReactionNetwork) -> Result<()> {
        if self.0.len() != net.num_steps() {
            return Err(Error::DimensionMismatch {
                what: "rate coefficients",
                expected: net.num_steps(),
                found: self.0.len(),
            });
        }
        Ok(())
    }
}

impl std::ops::Index<usize> for RateAssignment {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r1_matrices() {
        let net = network_from_dsl("A + B -> 2 B, B -> A").unwrap();
        assert_eq!(net.num_species(), 2);
        assert_eq!(net.num_steps(), 2);
        assert_eq!(net.gamma().column(0), vec![-1, 1]);
        assert_eq!(net.gamma().column(1), vec![1, -1]);
    }

    #[test]
    fn single_step_gamma() {
        let net = network_from_dsl("A -> B").unwrap();
        assert_eq!(net.gamma().column(0), vec![-1, 1]);
    }

    #[test]
    fn gamma_is_beta_minus_alpha() {
        let net = network_from_dsl("X + Y -> 2 Y, 0 -> X, Y -> 0").unwrap();
        assert_eq!(net.alpha().column(0), vec![1, 1]);
        assert_eq!(net.beta().column(0), vec![0, 2]);
        for i in 0..net.num_species() {
            for j in 0..net.num_steps() {
                assert_eq!(
                    net.gamma().get(i, j),
                    i64::from(net.beta().get(i, j)) - i64::from(net.alpha().get(i, j))
                );
            }
        }
    }

    #[test]
    fn wegscheider_gamma_rank_one() {
        let net = network_from_dsl("A <-> B, 2 A <-> A + B").unwrap();
        assert_eq!(net.num_steps(), 4);
        assert_eq!(crate::exact::rank(&net.gamma().to_rows()), 1);
    }

    #[test]
    fn duplicate_and_empty_rejected() {
        assert!(matches!(network_from_dsl("A -> B, A -> B"), Err(Error::DuplicateStep(_))));
        assert!(matches!(build_network(vec![], vec![]), Err(Error::EmptyNetwork)));
    }

    #[test]
    fn unused_species_rejected() {
        let species = vec![Species::named("A"), Species::named("B"), Species::named("C")];
        let steps = vec![ReactionStep::new(Complex::single(0), Complex::single(1))];
        assert!(matches!(build_network(species, steps), Err(Error::UnusedSpecies(s)) if s == "C"));
    }

    #[test]
    fn pairs_of_wegscheider_r1_and_mixed() {
        let w = network_from_dsl("A <-> B, 2 A <-> A + B").unwrap();
        let p = reversible_pairs(&w);
        assert_eq!(p.pairs, vec![(0, 1), (2, 3)]);
        assert!(p.fully_reversible);

        let r1 = network_from_dsl("A + B -> 2 B, B -> A").unwrap();
        let p = reversible_pairs(&r1);
        assert!(p.pairs.is_empty());
        assert!(!p.fully_reversible);

        let mixed = network_from_dsl("A -> B, B -> A, B -> C").unwrap();
        let p = reversible_pairs(&mixed);
        assert_eq!(p.pairs, vec![(0, 1)]);
        assert!(!p.fully_reversible);
        for &(i, j) in &p.pairs {
            assert_eq!(mixed.steps()[i].reactant, mixed.steps()[j].product);
            assert_eq!(mixed.steps()[i].product, mixed.steps()[j].reactant);
        }
    }

    #[test]
    fn display_round_trips() {
        let text = "0 -> X1, X1 <-> X2, 2 X2 + X1 -> 0";
        let net = network_from_dsl(text).unwrap();
        let again = network_from_dsl(&net.to_string()).unwrap();
        assert_eq!(net.steps(), again.steps());
        assert_eq!(net.species_names(), again.species_names());
    }

    #[test]
    fn rates_validated() {
        assert!(RateAssignment::new(vec![1.0, 2.0]).is_ok());
        assert!(matches!(
            RateAssignment::new(vec![1.0, 0.0]),
            Err(Error::NonpositiveRate { index: 1, .. })
        ));
        assert!(RateAssignment::new(vec![f64::NAN]).is_err());
    }
}
