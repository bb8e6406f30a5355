use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("jet of order {available} is too short, polynomial needs derivatives up to order {needed}")]
    InsufficientJetOrder { needed: usize, available: usize },

    #[error("warping function is not positive at r = {r} (value {value})")]
    NonpositiveWarp { r: f64, value: f64 },

    #[error("series has a nonzero constant term, logarithm expansion is undefined")]
    NonzeroConstantTerm,

    #[error("quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("missing base zeta data at arguments {needed:?}")]
    MissingZetaData { needed: Vec<f64> },

    #[error("gamma function pole at argument {0}")]
    GammaPole(f64),

    #[error("ODE step size underflow at r = {r}")]
    StepSizeUnderflow { r: f64 },

    #[error("solution lost monotonicity on the imaginary axis at r = {r}")]
    NonMonotone { r: f64 },

    #[error("tail of the nu-sum is not decaying fast enough (fitted exponent {exponent:.3}, need > {required:.3})")]
    TailNotDecaying { exponent: f64, required: f64 },

    #[error("eigenvalue bracketing failed for nu = {nu}: {reason}")]
    BracketingFailed { nu: f64, reason: String },

    #[error("base heat coefficient A_{{{index}/2}} not supplied")]
    MissingBaseCoefficient { index: usize },

    #[error("index {index} beyond computed tables (max {max})")]
    IndexBeyondTables { index: usize, max: usize },

    #[error("base spectrum does not reach nu = {needed} (last supplied {available})")]
    InsufficientSpectrum { needed: f64, available: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input data: {0}")]
    InvalidData(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag for the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InsufficientJetOrder { .. } => "InsufficientJetOrder",
            Error::NonpositiveWarp { .. } => "NonpositiveWarp",
            Error::NonzeroConstantTerm => "NonzeroConstantTerm",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::MissingZetaData { .. } => "MissingZetaData",
            Error::GammaPole(_) => "GammaPole",
            Error::StepSizeUnderflow { .. } => "StepSizeUnderflow",
            Error::NonMonotone { .. } => "NonMonotone",
            Error::TailNotDecaying { .. } => "TailNotDecaying",
            Error::BracketingFailed { .. } => "BracketingFailed",
            Error::MissingBaseCoefficient { .. } => "MissingBaseCoefficient",
            Error::IndexBeyondTables { .. } => "IndexBeyondTables",
            Error::InsufficientSpectrum { .. } => "InsufficientSpectrum",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::InvalidData(_) => "InvalidData",
            Error::Io(_) => "Io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidData(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
