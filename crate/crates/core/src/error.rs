use thiserror::Error;

/// Errors produced by automaton operations. Each variant carries the stable
/// kebab-case code used by the CLI and the text format diagnostics.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("invalid base {base}: bases must be at least 2")]
    InvalidBase { base: u64 },

    #[error("base mismatch: {left} vs {right}")]
    BaseMismatch { left: u32, right: u32 },

    #[error("automaton does not ignore leading zeros (transition from the initial state on digit 0 must be a self-loop)")]
    NotLeadingZeroInvariant,

    #[error("lifted alphabet k^{exponent} = {size} exceeds the cap {cap}")]
    AlphabetTooLarge { exponent: u32, size: u64, cap: u64 },

    #[error(
        "operation requires an idempotent automaton (zero action f must satisfy f(f(s)) = f(s))"
    )]
    RequiresIdempotent,

    #[error("operation requires outputs in {{0, 1}}, found token \"{found}\"")]
    NonBinaryOutputs { found: String },

    #[error("modulus must be at least 1")]
    ZeroModulus,

    #[error("bases {k} and {l} are multiplicatively dependent")]
    DependentBases { k: u32, l: u32 },

    #[error("search exhausted in stage {stage}: {message}")]
    SearchExhausted {
        stage: &'static str,
        message: String,
    },

    #[error("no ultimate period up to {p_max} found (stage {stage})")]
    NoUltimatePeriod { stage: &'static str, p_max: u64 },

    #[error("{p} is not prime")]
    NotPrime { p: u64 },

    #[error("line {line}: {message}")]
    Parse {
        line: usize,
        code: &'static str,
        message: String,
    },

    #[error("invalid automaton: {message}")]
    InvalidAutomaton { message: String },

    #[error("factor length {m} exceeds window length {window}")]
    WindowTooShort { m: usize, window: usize },

    #[error("windows use different output alphabets")]
    AlphabetMismatch,

    #[error("{0}")]
    InvalidArgument(String),
}

impl Error {
    /// Stable machine-readable code for this error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidBase { .. } => "invalid-base",
            Error::BaseMismatch { .. } => "base-mismatch",
            Error::NotLeadingZeroInvariant => "not-leading-zero-invariant",
            Error::AlphabetTooLarge { .. } => "alphabet-too-large",
            Error::RequiresIdempotent => "requires-idempotent",
            Error::NonBinaryOutputs { .. } => "non-binary-outputs",
            Error::ZeroModulus => "zero-modulus",
            Error::DependentBases { .. } => "dependent-bases",
            Error::SearchExhausted { .. } => "search-exhausted",
            Error::NoUltimatePeriod { .. } => "no-ultimate-period-found",
            Error::NotPrime { .. } => "not-prime",
            Error::Parse { code, .. } => code,
            Error::InvalidAutomaton { .. } => "invalid-automaton",
            Error::WindowTooShort { .. } => "window-too-short",
            Error::AlphabetMismatch => "alphabet-mismatch",
            Error::InvalidArgument(_) => "invalid-argument",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
