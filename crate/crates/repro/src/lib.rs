//! Executable acceptance criteria for crnkit. Every numeric claim is checked
//! against an independent oracle from [`oracles`].

use std::time::Instant;

use serde::Serialize;

mod criteria;
pub mod oracles;

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub id: u32,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
    pub budget_seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {:>2} {} ({:.2}s / {:.0}s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.budget_seconds,
            self.detail
        )
    }
}

struct Check {
    ok: bool,
    detail: String,
}

type CriterionFn = fn() -> Check;

const CRITERIA: &[(u32, &str, f64, CriterionFn)] = &[
    (1, "deficiency triple", 1.0, criteria::deficiencies),
    (2, "Wegscheider detailed balance", 1.0, criteria::wegscheider),
    (3, "ACR verdicts", 5.0, criteria::acr),
    (4, "Ross chain closed form and relaxation", 10.0, criteria::ross),
    (5, "stoichiometry counts", 60.0, criteria::stoichiometry),
    (6, "chain(1000) ODE performance", 60.0, criteria::chain_performance),
    (7, "stochastic correctness", 30.0, criteria::stochastic),
    (8, "detailed-balance soundness", 60.0, criteria::detailed_balance),
    (9, "Diophantine oracle equivalence", 60.0, criteria::diophantine),
    (10, "numerics hygiene", 60.0, criteria::numerics),
];

pub fn criterion_ids() -> Vec<u32> {
    CRITERIA.iter().map(|c| c.0).collect()
}

/// Runs one criterion; `None` for an unknown id.
pub fn run(id: u32) -> Option<Outcome> {
    let &(id, title, budget, f) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let check = f();
    let seconds = start.elapsed().as_secs_f64();
    let mut detail = check.detail;
    if seconds > budget {
        detail.push_str("; over time budget");
    }
    Some(Outcome { id, title, pass: check.ok && seconds <= budget, detail, seconds, budget_seconds: budget })
}

pub fn run_all() -> Vec<Outcome> {
    criterion_ids().into_iter().filter_map(run).collect()
}
