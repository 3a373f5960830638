//! Reaction-network analysis toolkit.
//!
//! A [`network::ReactionNetwork`] is the common input. On top of it:
//!
//! * [`structure`]: complex graph, linkage classes, deficiency, conservation laws
//! * [`detailed_balance`]: circuit and spanning-forest conditions
//! * [`robustness`]: absolute concentration robustness test
//! * [`deterministic`]: mass-action ODE, integrators, stationary points
//! * [`stochastic`]: direct SSA, tau-leaping, seeded ensembles
//! * [`stoichiometry`]: atomic matrix, elementary steps, decompositions, exact LP

// `!(x > 0.0)` is how NaN gets rejected; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod detailed_balance;
pub mod deterministic;
pub mod error;
pub mod exact;
pub mod exec;
pub mod network;
pub mod robustness;
pub mod stochastic;
pub mod stoichiometry;
pub mod structure;

pub use error::{Error, ErrorKind, Result};
pub use exec::Execution;
pub use network::{RateAssignment, ReactionNetwork};
