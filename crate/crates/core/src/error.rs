use thiserror::Error;

/// Errors produced by the clustering library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solver did not reach its tolerance.
    #[error("{what} did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence {
        what: &'static str,
        iterations: usize,
        residual: f64,
    },

    /// Vectors or matrices with incompatible dimensions.
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },

    /// Invalid run configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// The mode formula is undefined when alpha + beta = 2.
    #[error("mode undefined for alpha + beta = 2 (alpha = {alpha}, beta = {beta})")]
    UndefinedMode { alpha: f64, beta: f64 },

    /// Method-of-moments produced non-positive parameters.
    #[error("degenerate moment estimate (alpha = {alpha}, beta = {beta})")]
    DegenerateEstimate { alpha: f64, beta: f64 },

    /// No cluster assigns a finite log-density to a point.
    #[error("point {point} has a non-finite log-density under every cluster")]
    Assignment { point: usize },

    /// Malformed or out-of-simplex input data.
    #[error("data error at row {row}: {message}")]
    Data { row: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
