//! Atomic matrices, elementary-step generation and decomposition of overall
//! reactions into elementary steps. All integer and LP arithmetic is exact.

mod atomic;
mod decompose;
mod elementary;
mod formula;
pub mod lp;

pub use atomic::{atomic_matrix, AtomicMatrix};
pub use decompose::{
    cycles, decompositions, heuristic_decompositions, preprocess, CycleReport, DecompositionOptions,
    DecompositionSolution, Decompositions, Preprocessing,
};
pub use elementary::{
    elementary_network, elementary_reactions, reactant_complexes, ElementaryOptions, ElementaryStep,
};
pub use formula::{parse_formula, Formula};
