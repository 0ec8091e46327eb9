use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("infeasible distribution: {0}")]
    InfeasibleSpec(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    /// All points coincide, so the Fréchet variance is zero.
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// A covariance estimate could not be inverted.
    #[error("degenerate dispersion: {0}")]
    DegenerateDispersion(String),

    #[error("unbounded result: {0}")]
    Unbounded(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
