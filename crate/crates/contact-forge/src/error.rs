//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("parse error at byte {offset}: expected {}", expected.join(" | "))]
    ParseError { offset: usize, expected: Vec<String> },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("unbound symbol `{0}`")]
    UnboundSymbol(String),
    #[error("domain error in `{context}`: {message}")]
    DomainError { context: String, message: String },
    #[error("chart mismatch: `{0}` vs `{1}`")]
    ChartMismatch(String, String),
    #[error("degree overflow: degree {degree} on chart of dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("arity mismatch: expected {expected} vectors, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("singular linear system: residual {residual:e} exceeds tolerance")]
    SingularSystem { residual: f64 },
    #[error("degenerate volume form: |dvol(frame)| = {0:e}")]
    DegenerateVolume(f64),
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("trajectory left the chart domain at t = {t}")]
    LeftDomain { t: f64 },
    #[error("bracketing failure searching for a root in ({lo}, {hi})")]
    BracketFailure { lo: f64, hi: f64 },
    #[error("derivative tower depth exceeded")]
    DerivativeDepthExceeded,
    #[error("degenerate parametrization: tangent basis rank {rank}, expected {expected}")]
    DegenerateParametrization { rank: usize, expected: usize },
    #[error("unknown map kind `{0}`")]
    UnknownKind(String),
    #[error("config error at line {line}, column {column}: {message}")]
    ConfigError { line: usize, column: usize, message: String },
    #[error("chart dimension {0} exceeds the supported maximum {max}", max = crate::MAX_DIM)]
    DimensionCap(usize),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
