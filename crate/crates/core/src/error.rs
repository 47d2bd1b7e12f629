use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid parity index {0}, expected 0 (even) or 1 (odd)")]
    InvalidParity(i64),

    #[error("invalid precision policy: {0}")]
    InvalidPolicy(String),

    #[error("precision exhausted: {required} bits required, cap is {max} bits")]
    PrecisionExhausted { required: u32, max: u32 },

    #[error("insufficient series coefficients: need f_{needed}, have f_0..f_{available}")]
    InsufficientCoefficients { needed: usize, available: usize },

    #[error("Newton iteration did not converge after {iterations} iterations: {reason}")]
    NoConvergence { iterations: usize, reason: String },

    #[error("sequence not converged: {certified} certified digits, {target} requested")]
    NotConverged { certified: u32, target: u32 },

    #[error("degenerate slope fit: {0}")]
    DegenerateFit(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported output format `{0}`")]
    UnsupportedFormat(String),

    #[error("at dimension D = {dimension}: {source}")]
    AtDimension {
        dimension: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_dimension(self, dimension: usize) -> Self {
        match self {
            e @ Error::AtDimension { .. } => e,
            e => Error::AtDimension {
                dimension,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, with any dimension annotation stripped.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::AtDimension { source, .. } => source.root_cause(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
