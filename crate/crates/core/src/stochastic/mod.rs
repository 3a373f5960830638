//! Stochastic mass-action kinetics: Gillespie's direct method, explicit
//! tau-leaping and seeded ensembles.
//!
//! Propensities follow combinatorial mass action,
//! `a_r(x) = k_r prod_m x_m (x_m - 1) ... (x_m - alpha_mr + 1)`.

pub mod rng;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::network::{RateAssignment, ReactionNetwork};
use rng::{run_seed, Rng};

/// Avogadro's constant, for [`stochastic_rates`].
pub const AVOGADRO: f64 = 6.022_140_76e23;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrajectoryMethod {
    Direct,
    TauLeap,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JumpTrajectory {
    pub times: Vec<f64>,
    pub counts: Vec<Vec<i64>>,
    pub seed: u64,
    pub method: TrajectoryMethod,
    /// All propensities vanished before `t_end`.
    pub absorbed: bool,
    pub t_end: f64,
    /// Exact reaction events (direct method and tau-leap fallbacks).
    pub events: usize,
    /// Accepted leaps.
    pub leaps: usize,
}

/// Network compiled for repeated propensity evaluation.
#[derive(Clone, Debug)]
pub struct JumpSystem {
    m: usize,
    k: Vec<f64>,
    reactant: Vec<Vec<(usize, u32)>>,
    change: Vec<Vec<(usize, i64)>>,
    /// Per species: (highest order of a step consuming it, largest molecularity
    /// of the species among those steps).
    hor: Vec<(u32, u32)>,
}

impl JumpSystem {
    pub fn new(net: &ReactionNetwork, k: &RateAssignment) -> Result<Self> {
        k.check_len(net)?;
        let m = net.num_species();
        let reactant: Vec<Vec<(usize, u32)>> = net.steps().iter().map(|s| s.reactant.terms().to_vec()).collect();
        let change = (0..net.num_steps())
            .map(|r| net.reaction_vector(r).into_iter().enumerate().filter(|(_, g)| *g != 0).collect())
            .collect();
        let mut hor = vec![(0u32, 0u32); m];
        for terms in &reactant {
            let order: u32 = terms.iter().map(|t| t.1).sum();
            for &(i, e) in terms {
                let h = &mut hor[i];
                if order > h.0 {
                    *h = (order, e);
                } else if order == h.0 {
                    h.1 = h.1.max(e);
                }
            }
        }
        Ok(JumpSystem { m, k: k.values().to_vec(), reactant, change, hor })
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn propensities_into(&self, x: &[i64], out: &mut [f64]) {
        for (r, terms) in self.reactant.iter().enumerate() {
            let mut a = self.k[r];
            for &(i, e) in terms {
                let xi = x[i];
                for j in 0..i64::from(e) {
                    a *= (xi - j).max(0) as f64;
                }
            }
            out[r] = a;
        }
    }

    /// Propensities at a real-valued state (midpoint leaping).
    fn propensities_real(&self, x: &[f64], out: &mut [f64]) {
        for (r, terms) in self.reactant.iter().enumerate() {
            let mut a = self.k[r];
            for &(i, e) in terms {
                for j in 0..e {
                    a *= (x[i] - j as f64).max(0.0);
                }
            }
            out[r] = a;
        }
    }

    fn apply(&self, r: usize, times: i64, x: &mut [i64]) {
        for &(i, g) in &self.change[r] {
            x[i] += g * times;
        }
    }

    /// Leap size from the bounded relative change of propensities
    /// (Cao, Gillespie & Petzold 2006).
    fn select_tau(&self, x: &[i64], a: &[f64], eps: f64) -> f64 {
        let mut mu = vec![0.0; self.m];
        let mut sigma2 = vec![0.0; self.m];
        for (r, ch) in self.change.iter().enumerate() {
            for &(i, g) in ch {
                mu[i] += g as f64 * a[r];
                sigma2[i] += (g * g) as f64 * a[r];
            }
        }
        let mut tau = f64::INFINITY;
        for i in 0..self.m {
            let (order, nu) = self.hor[i];
            if order == 0 {
                continue;
            }
            let xi = x[i] as f64;
            let inv = |j: f64| 1.0 / (xi - j).max(1.0);
            let g = match (order, nu) {
                (1, _) => 1.0,
                (2, 1) => 2.0,
                (2, _) => 2.0 + inv(1.0),
                (3, 1) => 3.0,
                (3, 2) => 1.5 * (2.0 + inv(1.0)),
                (3, _) => 3.0 + inv(1.0) + 2.0 * inv(2.0),
                (o, _) => o as f64,
            };
            let bound = (eps * xi / g).max(1.0);
            if mu[i] != 0.0 {
                tau = tau.min(bound / mu[i].abs());
            }
            if sigma2[i] > 0.0 {
                tau = tau.min(bound * bound / sigma2[i]);
            }
        }
        tau
    }
}

/// Combinatorial mass-action propensities at integer state `x`.
pub fn propensities(net: &ReactionNetwork, k: &RateAssignment, x: &[i64]) -> Result<Vec<f64>> {
    check_counts(net, x)?;
    let sys = JumpSystem::new(net, k)?;
    let mut a = vec![0.0; net.num_steps()];
    sys.propensities_into(x, &mut a);
    Ok(a)
}

/// Converts deterministic rate coefficients (concentration units) to
/// stochastic ones for a reaction volume `volume` in litres:
/// `k_stoch = k_det (N_A V)^(1 - order)`.
pub fn stochastic_rates(net: &ReactionNetwork, k: &RateAssignment, volume: f64) -> Result<RateAssignment> {
    k.check_len(net)?;
    if !(volume > 0.0 && volume.is_finite()) {
        return Err(Error::InvalidArgument(format!("volume must be positive, got {volume}")));
    }
    let nv = AVOGADRO * volume;
    RateAssignment::new(
        net.steps()
            .iter()
            .zip(k.values())
            .map(|(s, &kr)| kr * nv.powi(1 - s.reactant.order() as i32))
            .collect(),
    )
}

fn check_counts(net: &ReactionNetwork, x: &[i64]) -> Result<()> {
    if x.len() != net.num_species() {
        return Err(Error::DimensionMismatch { what: "species counts", expected: net.num_species(), found: x.len() });
    }
    if let Some((species, &v)) = x.iter().enumerate().find(|(_, v)| **v < 0) {
        return Err(Error::NegativeConcentration { species, value: v as f64 });
    }
    Ok(())
}

fn check_time(t_max: f64) -> Result<()> {
    if !(t_max > 0.0 && t_max.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_max must be positive and finite, got {t_max}")));
    }
    Ok(())
}

/// Receives every state change: `(time, state)`; the first call is the
/// initial state at time zero.
trait Observer {
    fn observe(&mut self, t: f64, x: &[i64]);
}

struct Recorder {
    times: Vec<f64>,
    counts: Vec<Vec<i64>>,
}

impl Observer for Recorder {
    fn observe(&mut self, t: f64, x: &[i64]) {
        self.times.push(t);
        self.counts.push(x.to_vec());
    }
}

/// Keeps the last state at or before each sample time.
struct Sampler<'a> {
    times: &'a [f64],
    next: usize,
    current: Vec<i64>,
    out: Vec<Vec<i64>>,
}

impl Observer for Sampler<'_> {
    fn observe(&mut self, t: f64, x: &[i64]) {
        while self.next < self.times.len() && self.times[self.next] < t {
            self.out.push(self.current.clone());
            self.next += 1;
        }
        self.current.clear();
        self.current.extend_from_slice(x);
    }
}

impl Sampler<'_> {
    fn finish(mut self) -> Vec<Vec<i64>> {
        while self.out.len() < self.times.len() {
            self.out.push(self.current.clone());
        }
        self.out
    }
}

struct RunStats {
    absorbed: bool,
    events: usize,
    leaps: usize,
}

/// Up to `max_events` direct-method events starting at `*t`. Returns `true`
/// on absorption.
#[allow(clippy::too_many_arguments)]
fn direct_steps(
    sys: &JumpSystem,
    x: &mut [i64],
    t: &mut f64,
    t_max: f64,
    max_events: usize,
    rng: &mut Rng,
    a: &mut [f64],
    obs: &mut impl Observer,
    events: &mut usize,
) -> bool {
    for _ in 0..max_events {
        sys.propensities_into(x, a);
        let a0: f64 = a.iter().sum();
        if a0 <= 0.0 {
            return true;
        }
        let tau = rng.exponential(a0);
        let target = rng.uniform() * a0;
        if *t + tau > t_max {
            *t = t_max;
            return false;
        }
        let mut acc = 0.0;
        let mut chosen = None;
        for (r, &ar) in a.iter().enumerate() {
            if ar > 0.0 {
                acc += ar;
                chosen = Some(r);
                if target < acc {
                    break;
                }
            }
        }
        let r = chosen.expect("a0 > 0 implies a positive propensity");
        *t += tau;
        sys.apply(r, 1, x);
        *events += 1;
        obs.observe(*t, x);
    }
    false
}

fn run_direct(sys: &JumpSystem, x0: &[i64], t_max: f64, rng: &mut Rng, obs: &mut impl Observer) -> RunStats {
    let mut x = x0.to_vec();
    let mut a = vec![0.0; sys.k.len()];
    let mut t = 0.0;
    let mut events = 0;
    obs.observe(0.0, &x);
    let mut absorbed = false;
    while t < t_max {
        if direct_steps(sys, &mut x, &mut t, t_max, usize::MAX, rng, &mut a, obs, &mut events) {
            absorbed = true;
            break;
        }
    }
    RunStats { absorbed, events, leaps: 0 }
}

/// Exact simulation by Gillespie's direct method on `[0, t_max]`.
pub fn ssa_direct(
    net: &ReactionNetwork,
    k: &RateAssignment,
    x0: &[i64],
    t_max: f64,
    seed: u64,
) -> Result<JumpTrajectory> {
    check_counts(net, x0)?;
    check_time(t_max)?;
    let sys = JumpSystem::new(net, k)?;
    let mut rec = Recorder { times: Vec::new(), counts: Vec::new() };
    let stats = run_direct(&sys, x0, t_max, &mut Rng::new(seed), &mut rec);
    Ok(JumpTrajectory {
        times: rec.times,
        counts: rec.counts,
        seed,
        method: TrajectoryMethod::Direct,
        absorbed: stats.absorbed,
        t_end: t_max,
        events: stats.events,
        leaps: 0,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LeapVariant {
    /// Propensities re-evaluated at the deterministic half-leap state
    /// (Gillespie's estimated-midpoint leap).
    #[default]
    Midpoint,
    /// Propensities frozen at the start of the leap.
    Euler,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TauOptions {
    pub eps: f64,
    pub variant: LeapVariant,
    /// Halvings of a leap that would drive a count negative.
    pub max_halvings: u32,
    /// Exact steps taken instead of a leap that is too short or keeps failing.
    pub fallback_steps: usize,
    /// Leaps shorter than `threshold / a0` are replaced by exact steps.
    pub threshold: f64,
}

impl TauOptions {
    pub fn new(eps: f64) -> Self {
        TauOptions { eps, variant: LeapVariant::Midpoint, max_halvings: 20, fallback_steps: 100, threshold: 10.0 }
    }
}

fn run_tau(
    sys: &JumpSystem,
    x0: &[i64],
    t_max: f64,
    opts: &TauOptions,
    rng: &mut Rng,
    obs: &mut impl Observer,
) -> Result<RunStats> {
    let nr = sys.k.len();
    let mut x = x0.to_vec();
    let mut a = vec![0.0; nr];
    let mut am = vec![0.0; nr];
    let mut mid = vec![0.0; sys.m];
    let mut trial = vec![0i64; sys.m];
    let mut fire = vec![0i64; nr];
    let mut t = 0.0;
    let mut stats = RunStats { absorbed: false, events: 0, leaps: 0 };
    obs.observe(0.0, &x);
    while t < t_max {
        sys.propensities_into(&x, &mut a);
        let a0: f64 = a.iter().sum();
        if a0 <= 0.0 {
            stats.absorbed = true;
            break;
        }
        let mut tau = sys.select_tau(&x, &a, opts.eps);
        if tau.is_nan() || tau <= 0.0 {
            return Err(Error::LeapFailure { t });
        }
        if tau < opts.threshold / a0 {
            if direct_steps(sys, &mut x, &mut t, t_max, opts.fallback_steps, rng, &mut a, obs, &mut stats.events) {
                stats.absorbed = true;
                break;
            }
            continue;
        }
        tau = tau.min(t_max - t);
        let mut accepted = false;
        for _ in 0..=opts.max_halvings {
            let rates: &[f64] = match opts.variant {
                LeapVariant::Euler => &a,
                LeapVariant::Midpoint => {
                    for (i, v) in mid.iter_mut().enumerate() {
                        *v = x[i] as f64;
                    }
                    for (r, ch) in sys.change.iter().enumerate() {
                        for &(i, g) in ch {
                            mid[i] += 0.5 * tau * a[r] * g as f64;
                        }
                    }
                    mid.iter_mut().for_each(|v| *v = v.max(0.0));
                    sys.propensities_real(&mid, &mut am);
                    &am
                }
            };
            for r in 0..nr {
                fire[r] = rng.poisson(rates[r] * tau) as i64;
            }
            trial.copy_from_slice(&x);
            for (r, &n) in fire.iter().enumerate() {
                if n > 0 {
                    sys.apply(r, n, &mut trial);
                }
            }
            if trial.iter().all(|&v| v >= 0) {
                accepted = true;
                break;
            }
            tau *= 0.5;
        }
        if accepted {
            x.copy_from_slice(&trial);
            t += tau;
            if t_max - t <= 1e-12 * t_max {
                t = t_max;
            }
            stats.leaps += 1;
            obs.observe(t, &x);
        } else if direct_steps(sys, &mut x, &mut t, t_max, opts.fallback_steps, rng, &mut a, obs, &mut stats.events) {
            stats.absorbed = true;
            break;
        }
    }
    Ok(stats)
}

/// Explicit tau-leaping on `[0, t_max]`.
pub fn tau_leap(
    net: &ReactionNetwork,
    k: &RateAssignment,
    x0: &[i64],
    t_max: f64,
    opts: &TauOptions,
    seed: u64,
) -> Result<JumpTrajectory> {
    check_counts(net, x0)?;
    check_time(t_max)?;
    check_eps(opts.eps)?;
    let sys = JumpSystem::new(net, k)?;
    let mut rec = Recorder { times: Vec::new(), counts: Vec::new() };
    let stats = run_tau(&sys, x0, t_max, opts, &mut Rng::new(seed), &mut rec)?;
    Ok(JumpTrajectory {
        times: rec.times,
        counts: rec.counts,
        seed,
        method: TrajectoryMethod::TauLeap,
        absorbed: stats.absorbed,
        t_end: t_max,
        events: stats.events,
        leaps: stats.leaps,
    })
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.2) {
        return Err(Error::InvalidArgument(format!("eps must lie in (0, 0.2], got {eps}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum JumpMethod {
    Direct,
    TauLeap(TauOptions),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleStats {
    pub sample_times: Vec<f64>,
    /// `means[t][m]`.
    pub means: Vec<Vec<f64>>,
    /// Unbiased sample variances, zero for a single run.
    pub variances: Vec<Vec<f64>>,
    pub n_runs: usize,
    pub master_seed: u64,
}

impl EnsembleStats {
    /// Standard error of the mean of species `m` at sample `t`.
    pub fn standard_error(&self, t: usize, m: usize) -> f64 {
        (self.variances[t][m] / self.n_runs as f64).sqrt()
    }
}

/// `n` independent runs with seeds [`rng::run_seed`]`(master_seed, i)`,
/// sampled at `sample_times`. Aggregation is in run order, so the result is
/// bit-identical for any number of worker threads.
#[allow(clippy::too_many_arguments)]
pub fn ensemble(
    net: &ReactionNetwork,
    k: &RateAssignment,
    x0: &[i64],
    t_max: f64,
    method: JumpMethod,
    n: usize,
    master_seed: u64,
    sample_times: &[f64],
    execution: Execution,
) -> Result<EnsembleStats> {
    check_counts(net, x0)?;
    check_time(t_max)?;
    if n == 0 {
        return Err(Error::InvalidArgument("an ensemble needs at least one run".into()));
    }
    if sample_times.windows(2).any(|w| !(w[1] > w[0])) || sample_times.iter().any(|&s| !(0.0..=t_max).contains(&s)) {
        return Err(Error::InvalidArgument(format!(
            "sample times must be strictly increasing and within [0, {t_max}]"
        )));
    }
    if let JumpMethod::TauLeap(o) = &method {
        check_eps(o.eps)?;
    }
    let sys = JumpSystem::new(net, k)?;
    let runs = execution.map(n, |i| -> Result<Vec<Vec<i64>>> {
        let mut rng = Rng::new(run_seed(master_seed, i as u64));
        let mut sampler = Sampler { times: sample_times, next: 0, current: x0.to_vec(), out: Vec::new() };
        match &method {
            JumpMethod::Direct => {
                run_direct(&sys, x0, t_max, &mut rng, &mut sampler);
            }
            JumpMethod::TauLeap(o) => {
                run_tau(&sys, x0, t_max, o, &mut rng, &mut sampler)
                    .map_err(|e| Error::Run { run: i, source: Box::new(e) })?;
            }
        }
        Ok(sampler.finish())
    });
    let runs: Vec<Vec<Vec<i64>>> = runs.into_iter().collect::<Result<_>>()?;
    let m = net.num_species();
    let nt = sample_times.len();
    let mut means = vec![vec![0.0; m]; nt];
    let mut variances = vec![vec![0.0; m]; nt];
    for run in &runs {
        for (t, state) in run.iter().enumerate() {
            for (j, &v) in state.iter().enumerate() {
                means[t][j] += v as f64;
            }
        }
    }
    for row in means.iter_mut() {
        row.iter_mut().for_each(|v| *v /= n as f64);
    }
    if n > 1 {
        for run in &runs {
            for (t, state) in run.iter().enumerate() {
                for (j, &v) in state.iter().enumerate() {
                    variances[t][j] += (v as f64 - means[t][j]).powi(2);
                }
            }
        }
        for row in variances.iter_mut() {
            row.iter_mut().for_each(|v| *v /= (n - 1) as f64);
        }
    }
    Ok(EnsembleStats { sample_times: sample_times.to_vec(), means, variances, n_runs: n, master_seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::{load_builtin, network_from_dsl};
    use crate::structure::conservation_laws;

    #[test]
    fn propensity_examples() {
        let lv = load_builtin("lotka-volterra").unwrap();
        let a = propensities(&lv.network, &lv.rates, &[600, 400]).unwrap();
        assert!((a[1] - 240.0).abs() < 1e-12);
        let dimer = network_from_dsl("2 A -> B").unwrap();
        assert_eq!(propensities(&dimer, &RateAssignment::ones(1), &[1, 0]).unwrap(), vec![0.0]);
        assert_eq!(propensities(&dimer, &RateAssignment::ones(1), &[4, 0]).unwrap(), vec![12.0]);
        let lin = network_from_dsl("A -> B").unwrap();
        assert_eq!(propensities(&lin, &RateAssignment::new(vec![2.0]).unwrap(), &[5, 0]).unwrap(), vec![10.0]);
    }

    #[test]
    fn single_event_then_absorption() {
        let net = network_from_dsl("A -> B").unwrap();
        let tr = ssa_direct(&net, &RateAssignment::ones(1), &[1, 0], 1e6, 42).unwrap();
        assert_eq!(tr.counts, vec![vec![1, 0], vec![0, 1]]);
        assert!(tr.absorbed);
        assert!(tr.times[1] > 0.0);
    }

    #[test]
    fn direct_steps_are_reaction_vectors() {
        let b = load_builtin("envz-ompr").unwrap();
        let x0 = vec![30, 10, 0, 20, 0, 0, 0];
        let tr = ssa_direct(&b.network, &b.rates, &x0, 5.0, 9).unwrap();
        let laws = conservation_laws(&b.network);
        let cols: Vec<Vec<i64>> = (0..b.network.num_steps()).map(|r| b.network.reaction_vector(r)).collect();
        for w in tr.counts.windows(2) {
            let d: Vec<i64> = w[1].iter().zip(&w[0]).map(|(a, b)| a - b).collect();
            assert!(cols.contains(&d));
            assert!(w[1].iter().all(|&v| v >= 0));
        }
        for s in &tr.counts {
            for l in laws.iter().filter(|l| l.is_nonnegative()) {
                assert_eq!(l.evaluate_counts(s), l.evaluate_counts(&x0));
            }
        }
    }

    #[test]
    fn seeds_reproduce() {
        let lv = load_builtin("lotka-volterra").unwrap();
        let a = ssa_direct(&lv.network, &lv.rates, &[600, 400], 2.0, 1).unwrap();
        let b = ssa_direct(&lv.network, &lv.rates, &[600, 400], 2.0, 1).unwrap();
        assert_eq!(a, b);
        let c = ssa_direct(&lv.network, &lv.rates, &[600, 400], 2.0, 2).unwrap();
        assert_ne!(a.counts, c.counts);
        let o = TauOptions::new(0.03);
        assert_eq!(
            tau_leap(&lv.network, &lv.rates, &[600, 400], 2.0, &o, 5).unwrap(),
            tau_leap(&lv.network, &lv.rates, &[600, 400], 2.0, &o, 5).unwrap()
        );
    }

    #[test]
    fn tau_leap_absorbed_immediately() {
        let net = network_from_dsl("2 A -> B").unwrap();
        let tr = tau_leap(&net, &RateAssignment::ones(1), &[1, 0], 1.0, &TauOptions::new(0.03), 0).unwrap();
        assert!(tr.absorbed);
        assert_eq!(tr.counts, vec![vec![1, 0]]);
    }

    #[test]
    fn tau_leap_stays_nonnegative() {
        let net = network_from_dsl("A -> 0, 2 A -> B, B -> A").unwrap();
        let k = RateAssignment::new(vec![5.0, 0.1, 0.5]).unwrap();
        for seed in 0..20 {
            let tr = tau_leap(&net, &k, &[200, 0], 3.0, &TauOptions::new(0.2), seed).unwrap();
            assert!(tr.counts.iter().flatten().all(|&v| v >= 0));
            assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn ensemble_single_run_matches_trajectory() {
        let net = network_from_dsl("A -> B").unwrap();
        let k = RateAssignment::ones(1);
        let times = [0.0, 0.5, 1.0];
        let stats = ensemble(&net, &k, &[50, 0], 1.0, JumpMethod::Direct, 1, 3, &times, Execution::Sequential).unwrap();
        let tr = ssa_direct(&net, &k, &[50, 0], 1.0, run_seed(3, 0)).unwrap();
        for (i, &s) in times.iter().enumerate() {
            let idx = tr.times.iter().rposition(|&t| t <= s).unwrap();
            assert_eq!(stats.means[i], tr.counts[idx].iter().map(|&v| v as f64).collect::<Vec<_>>());
            assert_eq!(stats.variances[i], vec![0.0, 0.0]);
        }
    }

    #[test]
    fn ensemble_is_thread_independent() {
        let lv = load_builtin("lotka-volterra").unwrap();
        let times = [0.5, 1.0];
        let run = |ex| {
            ensemble(&lv.network, &lv.rates, &[600, 400], 1.0, JumpMethod::TauLeap(TauOptions::new(0.03)), 16, 77, &times, ex)
                .unwrap()
        };
        assert_eq!(run(Execution::Sequential), run(Execution::Parallel));
    }

    #[test]
    fn volume_conversion() {
        let net = network_from_dsl("0 -> A, A -> B, 2 A -> B").unwrap();
        let k = stochastic_rates(&net, &RateAssignment::new(vec![1.0, 2.0, 3.0]).unwrap(), 1e-15).unwrap();
        let nv = AVOGADRO * 1e-15;
        assert!((k[0] / nv - 1.0).abs() < 1e-12);
        assert_eq!(k[1], 2.0);
        assert!((k[2] * nv - 3.0).abs() < 1e-12);
    }
}
