use thiserror::Error;

/// Errors raised by the library. Variant names are stable and reported
/// verbatim by the CLI and the C ABI.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("InvalidPrime: {0} is not an odd prime")]
    InvalidPrime(String),
    #[error("InvalidContext: {0}")]
    InvalidContext(String),
    #[error("NonResidue: {0}")]
    NonResidue(String),
    #[error("InvalidInput: {0}")]
    InvalidInput(String),
    #[error("NegativeValuation: u is only defined on Z_p")]
    NegativeValuation,
    #[error("DivisionByZero")]
    DivisionByZero,
    #[error("ConventionMismatch: {0}")]
    ConventionMismatch(String),
    #[error("SchneiderDomain: Schneider's algorithm needs an input in Z_p")]
    SchneiderDomain,
    #[error("Terminated: the expansion already stopped")]
    Terminated,
    #[error("IndexBeyondFinite: index {index} but the expansion stops at {len}")]
    IndexBeyondFinite { index: usize, len: usize },
    #[error("NotFinite")]
    NotFinite,
    #[error("NotPeriodic")]
    NotPeriodic,
    #[error("InconsistentPeriod: {0}")]
    InconsistentPeriod(String),
    #[error("UnsupportedAlgorithm: {0}")]
    UnsupportedAlgorithm(String),
    #[error("UnsupportedInput: {0}")]
    UnsupportedInput(String),
    #[error("DegenerateZ: z is a root of the polynomial")]
    DegenerateZ,
    #[error("Parse: {0}")]
    Parse(String),
}

impl Error {
    /// The bare variant name, e.g. `NonResidue`.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidPrime(_) => "InvalidPrime",
            Error::InvalidContext(_) => "InvalidContext",
            Error::NonResidue(_) => "NonResidue",
            Error::InvalidInput(_) => "InvalidInput",
            Error::NegativeValuation => "NegativeValuation",
            Error::DivisionByZero => "DivisionByZero",
            Error::ConventionMismatch(_) => "ConventionMismatch",
            Error::SchneiderDomain => "SchneiderDomain",
            Error::Terminated => "Terminated",
            Error::IndexBeyondFinite { .. } => "IndexBeyondFinite",
            Error::NotFinite => "NotFinite",
            Error::NotPeriodic => "NotPeriodic",
            Error::InconsistentPeriod(_) => "InconsistentPeriod",
            Error::UnsupportedAlgorithm(_) => "UnsupportedAlgorithm",
            Error::UnsupportedInput(_) => "UnsupportedInput",
            Error::DegenerateZ => "DegenerateZ",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
