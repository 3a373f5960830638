//! Subcommand implementations. Each returns the full text to print.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use crnkit::deterministic::{integrate, stationary_points, Method, OdeOptions, StationaryOptions};
use crnkit::detailed_balance::{check_detailed_balance, conditions, MonomialEquation};
use crnkit::network::{
    import_chemkin_subset, load_builtin, network_from_dsl, parse_reaction_with, Complex, RateAssignment,
    ReactionNetwork,
};
use crnkit::robustness::{acr_test, AcrVerdict};
use crnkit::stochastic::{
    ensemble, ssa_direct, stochastic_rates, tau_leap, JumpMethod, JumpTrajectory, LeapVariant, TauOptions,
};
use crnkit::stoichiometry::{
    cycles, decompositions, elementary_reactions, heuristic_decompositions, parse_formula, preprocess,
    AtomicMatrix, DecompositionOptions, ElementaryOptions, Formula,
};
use crnkit::structure::{conservation_laws, fhj_graph, report_for, to_dot};
use crnkit::{ErrorKind, Execution};
use serde::Serialize;

use crate::output::{csv, f17, plot_data, to_json};
use crate::{Cli, Command, Format, JumpKind, Leap, Network, OdeMethod};

#[derive(Debug)]
pub enum CliError {
    Lib(crnkit::Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) => match e.kind() {
                ErrorKind::Parse => 2,
                ErrorKind::Domain => 3,
                ErrorKind::Numeric => 4,
                ErrorKind::Infeasible => 5,
            },
            CliError::Io(..) | CliError::Usage(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<crnkit::Error> for CliError {
    fn from(e: crnkit::Error) -> Self {
        CliError::Lib(e)
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub struct Output {
    pub text: String,
    pub status: u8,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Output { text, status: 0 }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn formats(cmd: &str, format: Format, allowed: &[Format]) -> Result<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        let names: Vec<String> = allowed.iter().map(|f| format!("{f:?}").to_lowercase()).collect();
        Err(CliError::Usage(format!(
            "`{cmd}` does not support --format {}; use one of {}",
            format!("{format:?}").to_lowercase(),
            names.join(", ")
        )))
    }
}

struct Loaded {
    net: ReactionNetwork,
    rates: RateAssignment,
    initial: Option<Vec<f64>>,
}

/// Network, rates (flag, model defaults, CHEMKIN pre-exponentials, else
/// ones) and the model's initial state if any.
fn load(n: &Network) -> Result<Loaded> {
    let s = &n.source;
    let (net, rates, initial) = if let Some(name) = &s.model {
        let b = load_builtin(name)?;
        (b.network, Some(b.rates), Some(b.initial))
    } else if let Some(text) = &s.reactions {
        (network_from_dsl(text)?, None, None)
    } else if let Some(path) = &s.file {
        (network_from_dsl(&read(path)?)?, None, None)
    } else if let Some(path) = &s.chemkin {
        let net = import_chemkin_subset(&read(path)?)?;
        let pre: Option<Vec<f64>> = net.arrhenius().iter().map(|a| a.map(|a| a.pre_exponential)).collect();
        let rates = match pre {
            Some(v) => Some(RateAssignment::for_network(&net, v)?),
            None => None,
        };
        (net, rates, None)
    } else {
        return Err(CliError::Usage("one of --model, --reactions, --file, --chemkin is required".into()));
    };
    let rates = match &n.rates {
        Some(v) => RateAssignment::for_network(&net, v.clone())?,
        None => rates.unwrap_or_else(|| RateAssignment::ones(net.num_steps())),
    };
    Ok(Loaded { net, rates, initial })
}

fn initial_state(l: &Loaded, flag: &Option<Vec<f64>>) -> Result<Vec<f64>> {
    match flag.clone().or_else(|| l.initial.clone()) {
        Some(v) => Ok(v),
        None => Err(CliError::Usage("--initial is required for this network source".into())),
    }
}

fn sample_grid(t0: f64, t1: f64, n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(CliError::Usage("--samples must be at least 2".into()));
    }
    Ok((0..n).map(|i| if i + 1 == n { t1 } else { t0 + (t1 - t0) * i as f64 / (n - 1) as f64 }).collect())
}

pub fn run(cli: &Cli) -> Result<Output> {
    let f = cli.format;
    match &cli.command {
        Command::Info { net } => info(net, f).map(Output::from),
        Command::Graph { net } => {
            formats("graph", f, &[Format::Text, Format::Dot])?;
            let l = load(net)?;
            Ok(to_dot(&l.net, &fhj_graph(&l.net), None).into())
        }
        Command::Db { net, tol } => db(net, *tol, f).map(Output::from),
        Command::Acr { net, initial, starts } => acr(net, initial, *starts, f).map(Output::from),
        Command::Ode {
            net,
            initial,
            perturb,
            t_start,
            t_end,
            method,
            rtol,
            atol,
            samples,
            max_steps,
            emit_plot_data,
        } => {
            formats("ode", f, &[Format::Text, Format::Csv, Format::Json])?;
            let l = load(net)?;
            let mut c0 = initial_state(&l, initial)?;
            for p in perturb {
                let (name, amount) = p
                    .split_once('=')
                    .and_then(|(s, a)| Some((s.trim(), a.trim().parse::<f64>().ok()?)))
                    .ok_or_else(|| CliError::Usage(format!("--perturb expects SPECIES=AMOUNT, got `{p}`")))?;
                let i = l
                    .net
                    .species_index(name)
                    .ok_or_else(|| CliError::Usage(format!("unknown species `{name}` in --perturb")))?;
                c0[i] += amount;
            }
            let opts = OdeOptions {
                method: match method {
                    OdeMethod::Dopri5 => Method::ExplicitAdaptive,
                    OdeMethod::Ros23 => Method::Stiff,
                },
                rtol: *rtol,
                atol: *atol,
                max_steps: *max_steps,
                samples: samples.map(|n| sample_grid(*t_start, *t_end, n)).transpose()?,
                ..OdeOptions::default()
            };
            let traj = integrate(&l.net, &l.rates, &c0, (*t_start, *t_end), &opts)?;
            let header = header(&l.net);
            let rows = || traj.times.iter().zip(&traj.states).map(|(t, c)| float_row(*t, c));
            if let Some(path) = emit_plot_data {
                write(path, &plot_data(&header, rows()))?;
            }
            if f == Format::Json {
                Ok(to_json(&OdeJson { species: l.net.species_names(), trajectory: &traj }).into())
            } else {
                Ok(csv(&header, rows()).into())
            }
        }
        Command::Stationary { net, initial, starts, positive } => {
            formats("stationary", f, &[Format::Text, Format::Csv, Format::Json])?;
            let l = load(net)?;
            let c0 = initial_state(&l, initial)?;
            let opts = StationaryOptions { positivity: *positive, starts: *starts, ..StationaryOptions::default() };
            let points = stationary_points(&l.net, &l.rates, &c0, &opts)?;
            match f {
                Format::Json => Ok(to_json(&StationaryJson { species: l.net.species_names(), points: &points }).into()),
                _ => {
                    let mut h: Vec<String> = l.net.species_names().to_vec();
                    h.push("residual".into());
                    Ok(csv(
                        &h,
                        points.iter().map(|p| {
                            let mut r: Vec<String> = p.c.iter().map(|x| f17(*x)).collect();
                            r.push(f17(p.residual));
                            r
                        }),
                    )
                    .into())
                }
            }
        }
        Command::Ssa {
            net,
            initial,
            t_end,
            method,
            eps,
            leap,
            seed,
            runs,
            samples,
            volume,
            emit_plot_data,
        } => {
            formats("ssa", f, &[Format::Text, Format::Csv, Format::Json])?;
            let l = load(net)?;
            let x0 = match initial {
                Some(v) => v.clone(),
                None => l
                    .initial
                    .as_ref()
                    .map(|c| c.iter().map(|x| x.round() as i64).collect())
                    .ok_or_else(|| CliError::Usage("--initial is required for this network source".into()))?,
            };
            let k = match volume {
                Some(v) => stochastic_rates(&l.net, &l.rates, *v)?,
                None => l.rates.clone(),
            };
            let mut tau = TauOptions::new(*eps);
            tau.variant = match leap {
                Leap::Midpoint => LeapVariant::Midpoint,
                Leap::Euler => LeapVariant::Euler,
            };
            if *runs > 1 {
                let n = samples.ok_or_else(|| CliError::Usage("--samples is required when --runs > 1".into()))?;
                let grid = sample_grid(0.0, *t_end, n)?;
                let jm = match method {
                    JumpKind::Direct => JumpMethod::Direct,
                    JumpKind::Tau => JumpMethod::TauLeap(tau),
                };
                let stats = ensemble(&l.net, &k, &x0, *t_end, jm, *runs, *seed, &grid, Execution::default())?;
                let names = l.net.species_names();
                let mut h = vec!["t".to_string()];
                h.extend(names.iter().map(|s| format!("mean_{s}")));
                h.extend(names.iter().map(|s| format!("var_{s}")));
                let rows = || {
                    stats.sample_times.iter().enumerate().map(|(i, t)| {
                        let mut r = vec![f17(*t)];
                        r.extend(stats.means[i].iter().map(|x| f17(*x)));
                        r.extend(stats.variances[i].iter().map(|x| f17(*x)));
                        r
                    })
                };
                if let Some(path) = emit_plot_data {
                    write(path, &plot_data(&h, rows()))?;
                }
                return Ok(if f == Format::Json {
                    to_json(&EnsembleJson { species: names, stats: &stats })
                } else {
                    csv(&h, rows())
                }
                .into());
            }
            let traj = match method {
                JumpKind::Direct => ssa_direct(&l.net, &k, &x0, *t_end, *seed)?,
                JumpKind::Tau => tau_leap(&l.net, &k, &x0, *t_end, &tau, *seed)?,
            };
            let traj = match samples {
                Some(n) => resample(&traj, &sample_grid(0.0, *t_end, *n)?),
                None => traj,
            };
            let h = header(&l.net);
            let rows = || {
                traj.times.iter().zip(&traj.counts).map(|(t, x)| {
                    let mut r = vec![f17(*t)];
                    r.extend(x.iter().map(|v| v.to_string()));
                    r
                })
            };
            if let Some(path) = emit_plot_data {
                write(path, &plot_data(&h, rows()))?;
            }
            Ok(if f == Format::Json {
                to_json(&SsaJson { species: l.net.species_names(), trajectory: &traj })
            } else {
                csv(&h, rows())
            }
            .into())
        }
        Command::Elementary { species, count_only, max_product } => {
            formats("elementary", f, &[Format::Text, Format::Json])?;
            elementary(species, *count_only, *max_product, f).map(Output::from)
        }
        Command::Decompose {
            net,
            overall,
            minimal: _,
            max_total,
            max_solutions,
            cycles: want_cycles,
            preprocess: want_pre,
            heuristic,
            seed,
        } => {
            formats("decompose", f, &[Format::Text, Format::Json])?;
            let l = load(net)?;
            let names = l.net.species_names();
            let target = parse_reaction_with(overall, names)?;
            let w = target.product.difference(&target.reactant, l.net.num_species());
            let gamma = l.net.gamma().to_rows();
            let mut report = DecomposeJson {
                overall: format!("{} -> {}", target.reactant.display(names), target.product.display(names)),
                steps: (0..l.net.num_steps()).map(|r| l.net.display_step(r)).collect(),
                decompositions: Vec::new(),
                truncated: false,
                cycles_exist: None,
                minimal_cycles: None,
                forced_steps: None,
                excluded_steps: None,
            };
            if let Some(attempts) = heuristic {
                report.decompositions = heuristic_decompositions(&gamma, &w, *attempts, *seed)?
                    .into_iter()
                    .map(|s| s.multipliers)
                    .collect();
            } else {
                let mut opts = DecompositionOptions::minimal();
                opts.max_solutions = *max_solutions;
                if let Some(t) = max_total {
                    opts.minimal_only = false;
                    opts.max_total = Some(*t);
                }
                let d = decompositions(&gamma, &w, &opts)?;
                report.truncated = d.truncated;
                report.decompositions = d.solutions.into_iter().map(|s| s.multipliers).collect();
            }
            if *want_cycles {
                let c = cycles(&gamma, *max_solutions)?;
                report.cycles_exist = Some(c.exists);
                report.minimal_cycles = Some(c.minimal_cycles.into_iter().map(|s| s.multipliers).collect());
            }
            if *want_pre {
                let p = preprocess(&gamma, &w, Execution::default())?;
                report.forced_steps = Some(p.forced_steps.iter().map(|r| r + 1).collect());
                report.excluded_steps = Some(p.excluded_steps.iter().map(|r| r + 1).collect());
            }
            Ok(if f == Format::Json { to_json(&report) } else { decompose_text(&report) }.into())
        }
        Command::Repro { criteria } => {
            formats("repro", f, &[Format::Text, Format::Json])?;
            let ids = if criteria.is_empty() { crnkit_repro::criterion_ids() } else { criteria.clone() };
            let mut outcomes = Vec::new();
            for id in ids {
                let o = crnkit_repro::run(id)
                    .ok_or_else(|| CliError::Usage(format!("unknown criterion {id}")))?;
                if f == Format::Text {
                    println!("{}", o.line());
                }
                outcomes.push(o);
            }
            let passed = outcomes.iter().filter(|o| o.pass).count();
            let status = u8::from(passed != outcomes.len());
            let text = if f == Format::Json {
                to_json(&outcomes)
            } else {
                format!("{passed} of {} criteria pass\n", outcomes.len())
            };
            Ok(Output { text, status })
        }
    }
}

fn header(net: &ReactionNetwork) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(net.species_names().iter().cloned());
    h
}

fn float_row(t: f64, c: &[f64]) -> Vec<String> {
    let mut r = vec![f17(t)];
    r.extend(c.iter().map(|x| f17(*x)));
    r
}

/// State at each grid time: the last recorded state at or before it.
fn resample(traj: &JumpTrajectory, grid: &[f64]) -> JumpTrajectory {
    let mut counts = Vec::with_capacity(grid.len());
    let mut j = 0;
    for &t in grid {
        while j + 1 < traj.times.len() && traj.times[j + 1] <= t {
            j += 1;
        }
        counts.push(traj.counts[j].clone());
    }
    JumpTrajectory { times: grid.to_vec(), counts, ..traj.clone() }
}

#[derive(Serialize)]
struct ComponentJson {
    complexes: Vec<String>,
    terminal: bool,
}

#[derive(Serialize)]
#[allow(non_snake_case)]
struct InfoJson {
    species: Vec<String>,
    complexes: Vec<String>,
    N: usize,
    L: usize,
    S: usize,
    deficiency: i64,
    reversible_pairs: usize,
    linkage_classes: Vec<Vec<String>>,
    strong_components: Vec<ComponentJson>,
    terminal: Vec<String>,
    weakly_reversible: bool,
    conservation_laws: Vec<Vec<i64>>,
}

fn info(n: &Network, f: Format) -> Result<String> {
    let l = load(n)?;
    let net = &l.net;
    let graph = fhj_graph(net);
    if f == Format::Dot {
        return Ok(to_dot(net, &graph, None));
    }
    formats("info", f, &[Format::Text, Format::Json, Format::Dot])?;
    let rep = report_for(net, &graph);
    let names = net.species_names();
    let show = |v: usize| graph.complexes[v].display(names).to_string();
    let laws = conservation_laws(net);
    let info = InfoJson {
        species: names.to_vec(),
        complexes: (0..graph.num_vertices()).map(show).collect(),
        N: rep.n,
        L: rep.l,
        S: rep.s,
        deficiency: rep.deficiency,
        reversible_pairs: rep.p,
        linkage_classes: rep.linkage_classes.iter().map(|c| c.iter().map(|&v| show(v)).collect()).collect(),
        strong_components: rep
            .strong_components
            .iter()
            .map(|c| ComponentJson { complexes: c.vertices.iter().map(|&v| show(v)).collect(), terminal: c.terminal })
            .collect(),
        terminal: rep.strong_components.iter().filter(|c| c.terminal).flat_map(|c| c.vertices.iter().map(|&v| show(v))).collect(),
        weakly_reversible: rep.weakly_reversible,
        conservation_laws: laws.iter().map(|w| w.weights.clone()).collect(),
    };
    if f == Format::Json {
        return Ok(to_json(&info));
    }
    let mut s = String::new();
    s += &format!("species ({}): {}\n", info.species.len(), info.species.join(", "));
    s += &format!("complexes (N = {}): {}\n", info.N, info.complexes.join(", "));
    s += &format!("linkage classes (L = {}):\n", info.L);
    for c in &info.linkage_classes {
        s += &format!("  {}\n", c.join(", "));
    }
    s += &format!("rank (S = {})\n", info.S);
    s += &format!("deficiency: {} - {} - {} = {}\n", info.N, info.L, info.S, info.deficiency);
    s += &format!("reversible pairs: {}\n", info.reversible_pairs);
    s += &format!("weakly reversible: {}\n", if info.weakly_reversible { "yes" } else { "no" });
    s += "strong components:\n";
    for c in &info.strong_components {
        s += &format!("  {{{}}}{}\n", c.complexes.join(", "), if c.terminal { " terminal" } else { "" });
    }
    s += &format!("conservation laws ({}):\n", laws.len());
    for w in &laws {
        s += &format!("  {}\n", combination(&w.weights, names));
    }
    Ok(s)
}

fn combination(weights: &[i64], names: &[String]) -> String {
    let mut s = String::new();
    for (w, name) in weights.iter().zip(names).filter(|(w, _)| **w != 0) {
        let sign = if *w < 0 { "-" } else { "+" };
        if s.is_empty() {
            if *w < 0 {
                s.push('-');
            }
        } else {
            s += &format!(" {sign} ");
        }
        if w.abs() != 1 {
            s += &format!("{} ", w.abs());
        }
        s += name;
    }
    s
}

#[derive(Serialize)]
struct ConditionJson {
    text: String,
    lhs: std::collections::BTreeMap<usize, u64>,
    rhs: std::collections::BTreeMap<usize, u64>,
}

impl From<&MonomialEquation> for ConditionJson {
    /// 1-based step indices as in the text form.
    fn from(e: &MonomialEquation) -> Self {
        let c = e.canonical();
        let shift = |m: &std::collections::BTreeMap<usize, u64>| m.iter().map(|(&i, &x)| (i + 1, x)).collect();
        ConditionJson { text: e.to_string(), lhs: shift(&c.lhs), rhs: shift(&c.rhs) }
    }
}

#[derive(Serialize)]
struct DbJson {
    circuit_conditions: Vec<ConditionJson>,
    spanning_forest_conditions: Vec<ConditionJson>,
    rates: Option<Vec<f64>>,
    holds: Option<bool>,
    max_residual: Option<f64>,
}

fn db(n: &Network, tol: f64, f: Format) -> Result<String> {
    formats("db", f, &[Format::Text, Format::Json])?;
    let l = load(n)?;
    let conds = conditions(&l.net)?;
    let check = match &n.rates {
        Some(_) => Some(check_detailed_balance(&l.net, &l.rates, tol, None)?),
        None => None,
    };
    if f == Format::Json {
        return Ok(to_json(&DbJson {
            circuit_conditions: conds.circuit.iter().map(ConditionJson::from).collect(),
            spanning_forest_conditions: conds.spanning_forest.iter().map(ConditionJson::from).collect(),
            rates: check.as_ref().map(|_| l.rates.values().to_vec()),
            holds: check.as_ref().map(|c| c.holds),
            max_residual: check.as_ref().map(|c| c.max_residual()),
        }));
    }
    let mut s = format!("spanning forest conditions ({}):\n", conds.spanning_forest.len());
    for e in &conds.spanning_forest {
        s += &format!("  {e}\n");
    }
    if conds.circuit.is_empty() {
        s += "circuit conditions (0): the complex graph has no cycle\n";
    } else {
        s += &format!("circuit conditions ({}):\n", conds.circuit.len());
        for e in &conds.circuit {
            s += &format!("  {e}\n");
        }
    }
    if let Some(c) = check {
        s += &format!(
            "detailed balance at the given rates: {} (max log residual {})\n",
            if c.holds { "holds" } else { "fails" },
            f17(c.max_residual())
        );
    }
    Ok(s)
}

#[derive(Serialize)]
struct WitnessJson {
    first: String,
    second: String,
    species: String,
}

#[derive(Serialize)]
struct AcrJson {
    deficiency: i64,
    verdict: AcrVerdict,
    robust_species: Vec<String>,
    witness_pairs: Vec<WitnessJson>,
    positive_point: Option<Vec<f64>>,
}

fn acr(n: &Network, initial: &Option<Vec<f64>>, starts: usize, f: Format) -> Result<String> {
    formats("acr", f, &[Format::Text, Format::Json])?;
    let l = load(n)?;
    let c0 = match initial.clone().or_else(|| l.initial.clone()) {
        Some(v) => v,
        None => vec![1.0; l.net.num_species()],
    };
    let opts = StationaryOptions { starts, ..StationaryOptions::default() };
    let rep = acr_test(&l.net, &l.rates, &c0, &opts)?;
    let graph = fhj_graph(&l.net);
    let names = l.net.species_names();
    let show = |c: &Complex| c.display(names).to_string();
    let out = AcrJson {
        deficiency: rep.deficiency,
        verdict: rep.verdict,
        robust_species: rep.robust_species.iter().map(|&i| names[i].clone()).collect(),
        witness_pairs: rep
            .witness_pairs
            .iter()
            .map(|p| WitnessJson {
                first: show(&graph.complexes[p.first]),
                second: show(&graph.complexes[p.second]),
                species: names[p.species].clone(),
            })
            .collect(),
        positive_point: rep.positive_point,
    };
    if f == Format::Json {
        return Ok(to_json(&out));
    }
    let verdict = match out.verdict {
        AcrVerdict::RobustSpeciesFound => "robust species found",
        AcrVerdict::TheoremInapplicable => "theorem inapplicable (deficiency is not 1)",
        AcrVerdict::NoPositivePointFound => "no positive stationary point found",
    };
    let mut s = format!("deficiency: {}\nverdict: {verdict}\n", out.deficiency);
    s += &format!("robust species: {}\n", if out.robust_species.is_empty() { "none".into() } else { out.robust_species.join(", ") });
    for w in &out.witness_pairs {
        s += &format!("  witness: {} / {} (differ in {})\n", w.first, w.second, w.species);
    }
    if let Some(c) = &out.positive_point {
        let parts: Vec<String> = names.iter().zip(c).map(|(n, x)| format!("{n} = {}", f17(*x))).collect();
        s += &format!("positive stationary point: {}\n", parts.join(", "));
    }
    Ok(s)
}

#[derive(Serialize)]
struct OdeJson<'a> {
    species: &'a [String],
    #[serde(flatten)]
    trajectory: &'a crnkit::deterministic::OdeTrajectory,
}

#[derive(Serialize)]
struct StationaryJson<'a> {
    species: &'a [String],
    points: &'a [crnkit::deterministic::StationaryPoint],
}

#[derive(Serialize)]
struct SsaJson<'a> {
    species: &'a [String],
    #[serde(flatten)]
    trajectory: &'a JumpTrajectory,
}

#[derive(Serialize)]
struct EnsembleJson<'a> {
    species: &'a [String],
    #[serde(flatten)]
    stats: &'a crnkit::stochastic::EnsembleStats,
}

#[derive(Serialize)]
struct ElementaryJson {
    species: Vec<String>,
    identifiers: Vec<String>,
    atomic_matrix: AtomicJson,
    count: usize,
    steps: Vec<String>,
}

#[derive(Serialize)]
struct AtomicJson {
    rows: Vec<String>,
    entries: Vec<Vec<i64>>,
}

fn elementary(path: &Path, count_only: bool, max_product: Option<u32>, f: Format) -> Result<String> {
    let text = read(path)?;
    let formulas: Vec<Formula> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(parse_formula)
        .collect::<crnkit::Result<_>>()?;
    let texts: Vec<&str> = formulas.iter().map(|f| f.text.as_str()).collect();
    let a = AtomicMatrix::from_formulas(&formulas);
    let opts = ElementaryOptions { max_product_molecularity: max_product, ..ElementaryOptions::default() };
    let steps = elementary_reactions(&a, &opts)?;
    let ids: Vec<String> = formulas.iter().map(Formula::identifier).collect();
    if count_only && f == Format::Text {
        return Ok(format!("{}\n", steps.len()));
    }
    let lines: Vec<String> = steps
        .iter()
        .map(|s| {
            let side = |v: &[u32]| Complex::from_dense(v).display(&ids).to_string();
            format!("{} -> {}", side(&s.reactant), side(&s.product))
        })
        .collect();
    if f == Format::Json {
        return Ok(to_json(&ElementaryJson {
            species: texts.iter().map(|s| s.to_string()).collect(),
            identifiers: ids,
            atomic_matrix: AtomicJson { rows: a.rows.clone(), entries: a.entries.clone() },
            count: steps.len(),
            steps: if count_only { Vec::new() } else { lines },
        }));
    }
    let mut s = lines.join(",\n");
    s.push('\n');
    Ok(s)
}

#[derive(Serialize)]
struct DecomposeJson {
    overall: String,
    steps: Vec<String>,
    decompositions: Vec<Vec<u64>>,
    truncated: bool,
    cycles_exist: Option<bool>,
    minimal_cycles: Option<Vec<Vec<u64>>>,
    /// 1-based.
    forced_steps: Option<Vec<usize>>,
    excluded_steps: Option<Vec<usize>>,
}

fn combination_of_steps(x: &[u64], steps: &[String]) -> String {
    let terms: Vec<String> = x
        .iter()
        .enumerate()
        .filter(|(_, &m)| m > 0)
        .map(|(r, &m)| if m == 1 { format!("[{}]", steps[r]) } else { format!("{m} [{}]", steps[r]) })
        .collect();
    terms.join(" + ")
}

fn decompose_text(r: &DecomposeJson) -> String {
    let mut s = format!("overall: {}\n", r.overall);
    s += &format!(
        "decompositions ({}{}):\n",
        r.decompositions.len(),
        if r.truncated { ", truncated" } else { "" }
    );
    for x in &r.decompositions {
        s += &format!("  {}\n", combination_of_steps(x, &r.steps));
    }
    if let Some(exists) = r.cycles_exist {
        s += &format!("cycles exist: {}\n", if exists { "yes" } else { "no" });
        for c in r.minimal_cycles.iter().flatten() {
            s += &format!("  cycle: {}\n", combination_of_steps(c, &r.steps));
        }
    }
    if let (Some(forced), Some(excluded)) = (&r.forced_steps, &r.excluded_steps) {
        let list = |v: &[usize]| {
            if v.is_empty() {
                "none".to_string()
            } else {
                v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
            }
        };
        s += &format!("forced steps: {}\nexcluded steps: {}\n", list(forced), list(excluded));
    }
    s
}
