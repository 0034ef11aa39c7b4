use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("spectral range is zero, target ratios are undefined")]
    DegenerateRange,
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("invalid target vector: {0}")]
    InvalidTarget(String),
    #[error("matrix is not bi-stochastic: {0}")]
    NotBistochastic(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),
    #[error("invalid probe state: {0}")]
    InvalidProbe(String),
    #[error("control matrix {index} is not unitary (deviation {deviation:e})")]
    NotUnitary { index: usize, deviation: f64 },
    #[error("nullspace has no direction with positive effective range")]
    NoDirection,
    #[error("linear program is infeasible: {0}")]
    Infeasible(String),
    #[error("linear program is unbounded")]
    Unbounded,
    #[error("index m={m} out of range for n={n}")]
    IndexOutOfRange { m: usize, n: usize },
    #[error("no perfect matching on residual support (remaining mass {remaining:e})")]
    MatchingFailed { remaining: f64 },
    #[error("no sampled chain of {k} swaps admits the target ({tries} tries)")]
    NoFeasibleChain { k: usize, tries: usize },
    #[error("eta has weight {weight:e} outside the support of gamma")]
    SingularSupport { weight: f64 },
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("level table needs at least 2 levels, found {0}")]
    TooFewLevels(usize),
    #[error("unknown figure id `{0}`")]
    UnknownFigure(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad inputs rather than broken internals.
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Invariant(_))
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::DegenerateRange => "degenerate_range",
            Error::InvalidSpectrum(_) => "invalid_spectrum",
            Error::InvalidTarget(_) => "invalid_target",
            Error::NotBistochastic(_) => "not_bistochastic",
            Error::InvalidPermutation(_) => "invalid_permutation",
            Error::InvalidSchedule(_) => "invalid_schedule",
            Error::InvalidProbe(_) => "invalid_probe",
            Error::NotUnitary { .. } => "not_unitary",
            Error::NoDirection => "no_direction",
            Error::Infeasible(_) => "infeasible",
            Error::Unbounded => "unbounded",
            Error::IndexOutOfRange { .. } => "index_out_of_range",
            Error::MatchingFailed { .. } => "matching_failed",
            Error::NoFeasibleChain { .. } => "no_feasible_chain",
            Error::SingularSupport { .. } => "singular_support",
            Error::InvalidPrior(_) => "invalid_prior",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Parse(_) => "parse_error",
            Error::TooFewLevels(_) => "too_few_levels",
            Error::UnknownFigure(_) => "unknown_figure",
            Error::MissingInput(_) => "missing_input",
            Error::Invariant(_) => "invariant",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}
