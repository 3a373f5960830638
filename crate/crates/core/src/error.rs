use num_rational::BigRational;
use thiserror::Error;

/// Coarse classification used by front ends to pick exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Domain,
    Numeric,
    Infeasible,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at {position}: {message} (found `{token}`)")]
    Syntax {
        position: usize,
        token: String,
        message: String,
    },
    #[error("line {line}: {message}")]
    LineSyntax { line: usize, message: String },
    #[error("null step: reactant and product complexes are both `{0}`")]
    NullStep(String),
    #[error("duplicate step `{0}`")]
    DuplicateStep(String),
    #[error("network has no reaction steps")]
    EmptyNetwork,
    #[error("species `{0}` does not take part in any step")]
    UnusedSpecies(String),
    #[error("unknown model `{name}`; available: {available}")]
    UnknownModel { name: String, available: String },
    #[error("missing `{0}` block")]
    MissingBlock(&'static str),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("step {0} has no reverse step; the network is not fully reversible")]
    NotReversible(usize),
    #[error("rate coefficient {index} is {value}; rates must be positive and finite")]
    NonpositiveRate { index: usize, value: f64 },
    #[error("expected {expected} {what}, got {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("negative concentration {value} for species {species}")]
    NegativeConcentration { species: usize, value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("formula `{formula}`: {message}")]
    FormulaSyntax { formula: String, message: String },
    #[error("unknown element symbol `{0}`")]
    UnknownElement(String),
    #[error("species {0} carries no atoms; set a product molecularity cap to bound the enumeration")]
    UnboundedEnumeration(usize),
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("maximum number of steps ({max_steps}) exceeded at t = {t}")]
    MaxStepsExceeded { max_steps: usize, t: f64 },
    #[error("Newton iteration failed from every start")]
    NoConvergence,
    #[error("tau-leaping could not make progress at t = {t}")]
    LeapFailure { t: f64 },
    #[error("run {run}: {source}")]
    Run {
        run: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("the linear relaxation is infeasible")]
    Infeasible { certificate: Vec<BigRational> },
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            Syntax { .. } | LineSyntax { .. } | NullStep(_) | FormulaSyntax { .. } | MissingBlock(_) => {
                ErrorKind::Parse
            }
            StepSizeUnderflow { .. } | MaxStepsExceeded { .. } | NoConvergence | LeapFailure { .. } => {
                ErrorKind::Numeric
            }
            Infeasible { .. } => ErrorKind::Infeasible,
            Run { source, .. } => source.kind(),
            _ => ErrorKind::Domain,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
