use thiserror::Error;

/// Errors raised by the exact and numeric routines of this crate.
///
/// Variants are split into precondition violations (the caller asked for
/// something outside an operation's domain) and everything else; the CLI
/// maps the former to exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VarMismatch { left: Vec<String>, right: Vec<String> },

    #[error("unknown variable {0:?}")]
    UnknownVariable(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("parameters ({l1}, {l2}, {l3}) are not in the singular set")]
    NotSingular { l1: String, l2: String, l3: String },

    #[error("order mismatch: operator has a = {a} but (l3 - l1 - l2)/2 = {expected}")]
    OrderMismatch { a: u32, expected: String },

    #[error("nu - lambda = {0} is not an even non-negative integer")]
    NotDifferentialLocus(String),

    #[error("generator {generator} is out of range for dimension {n}")]
    GeneratorOutOfRange { generator: String, n: usize },

    #[error("dimension {0} is too small (need n >= 2)")]
    DimensionTooSmall(usize),

    #[error("kernel integral diverges: {0}")]
    Divergent(String),

    #[error("quadrature did not converge: error estimate {estimate:e} exceeds {threshold:e}")]
    NoConvergence { estimate: f64, threshold: f64 },

    #[error("invalid descriptor: {0}")]
    Descriptor(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("table data: {0}")]
    Table(String),
}

impl Error {
    /// True for errors that signal a violated precondition rather than a fault.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::NoConvergence { .. } | Error::Table(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
