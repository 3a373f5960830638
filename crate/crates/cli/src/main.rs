//! `crnkit`: command-line access to the reaction-network toolkit.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "crnkit", version, about = "Reaction-network analysis and simulation")]
pub struct Cli {
    /// Maximum number of worker threads.
    #[arg(long, global = true, env = "CRNKIT_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
    Dot,
}

/// Where the mechanism comes from; exactly one is required.
#[derive(Args, Clone, Debug)]
#[group(required = true, multiple = false)]
pub struct Source {
    /// Built-in model (wegscheider, wegscheider-irrev, envz-ompr, ross-chain, lotka-volterra, consecutive, chain(n)).
    #[arg(long)]
    pub model: Option<String>,
    /// Mechanism in the reaction DSL, e.g. "A + B -> 2 B, B -> A".
    #[arg(long)]
    pub reactions: Option<String>,
    /// File containing a mechanism in the reaction DSL.
    #[arg(long)]
    pub file: Option<PathBuf>,
    /// CHEMKIN file (SPECIES and REACTIONS blocks).
    #[arg(long)]
    pub chemkin: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct Network {
    #[command(flatten)]
    pub source: Source,
    /// Rate coefficients in step order, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub rates: Option<Vec<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OdeMethod {
    Dopri5,
    Ros23,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum JumpKind {
    Direct,
    Tau,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Leap {
    Midpoint,
    Euler,
}

#[derive(Subcommand)]
pub enum Command {
    /// Complexes, linkage classes, deficiency and conservation laws.
    Info {
        #[command(flatten)]
        net: Network,
    },
    /// The complex graph in GraphViz format.
    Graph {
        #[command(flatten)]
        net: Network,
    },
    /// Detailed-balance conditions, optionally checked at the given rates.
    Db {
        #[command(flatten)]
        net: Network,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Absolute concentration robustness test.
    Acr {
        #[command(flatten)]
        net: Network,
        /// Initial concentrations selecting the compatibility class.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        initial: Option<Vec<f64>>,
        #[arg(long, default_value_t = 16)]
        starts: usize,
    },
    /// Mass-action ODE trajectory.
    Ode {
        #[command(flatten)]
        net: Network,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        initial: Option<Vec<f64>>,
        /// Add to initial values, e.g. --perturb X1=100.
        #[arg(long = "perturb", value_name = "SPECIES=AMOUNT")]
        perturb: Vec<String>,
        #[arg(long, default_value_t = 0.0)]
        t_start: f64,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, value_enum, default_value_t = OdeMethod::Dopri5)]
        method: OdeMethod,
        #[arg(long, default_value_t = 1e-8)]
        rtol: f64,
        #[arg(long, default_value_t = 1e-10)]
        atol: f64,
        /// Number of equally spaced output times (default: every accepted step).
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: usize,
        /// Also write gnuplot-ready columns to this file.
        #[arg(long)]
        emit_plot_data: Option<PathBuf>,
    },
    /// Stationary points in the compatibility class of the initial state.
    Stationary {
        #[command(flatten)]
        net: Network,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        initial: Option<Vec<f64>>,
        #[arg(long, default_value_t = 16)]
        starts: usize,
        /// Keep only strictly positive points.
        #[arg(long)]
        positive: bool,
    },
    /// Stochastic simulation: one trajectory or an ensemble.
    Ssa {
        #[command(flatten)]
        net: Network,
        /// Initial molecule counts.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        initial: Option<Vec<i64>>,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, value_enum, default_value_t = JumpKind::Direct)]
        method: JumpKind,
        #[arg(long, default_value_t = 0.03)]
        eps: f64,
        #[arg(long, value_enum, default_value_t = Leap::Midpoint)]
        leap: Leap,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Number of equally spaced output times (required for ensembles).
        #[arg(long)]
        samples: Option<usize>,
        /// Convert deterministic rates for this volume in litres.
        #[arg(long)]
        volume: Option<f64>,
        #[arg(long)]
        emit_plot_data: Option<PathBuf>,
    },
    /// All elementary steps among the species of a formula file.
    Elementary {
        /// One formula per line; `#` starts a comment.
        #[arg(long)]
        species: PathBuf,
        #[arg(long)]
        count_only: bool,
        /// Cap on product molecularity (needed for atom-free species such as e^-).
        #[arg(long)]
        max_product: Option<u32>,
    },
    /// Decompositions of an overall reaction into the steps of a network.
    Decompose {
        #[command(flatten)]
        net: Network,
        /// Overall reaction over the network's species, e.g. "A -> C".
        #[arg(long)]
        overall: String,
        /// Only cycle-free decompositions (the default unless --max-total is given).
        #[arg(long)]
        minimal: bool,
        /// List every decomposition with at most this many step occurrences.
        #[arg(long, conflicts_with = "minimal")]
        max_total: Option<u64>,
        #[arg(long)]
        max_solutions: Option<usize>,
        /// Also report cycle existence and the minimal cycles.
        #[arg(long)]
        cycles: bool,
        /// Also report forced and excluded steps.
        #[arg(long)]
        preprocess: bool,
        /// Randomised search with this many attempts instead of the exact algorithm.
        #[arg(long)]
        heuristic: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the acceptance criteria and print a pass/fail table.
    Repro {
        /// Criterion ids (default: all).
        criteria: Vec<u32>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        crnkit::exec::set_max_threads(n.max(1));
    }
    match commands::run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.status)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
