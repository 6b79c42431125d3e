use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("fractional order must lie strictly inside (0, 1), got {0}")]
    InvalidOrder(f64),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("singular tridiagonal system: zero or denormal pivot at row {index}")]
    SingularPivot { index: usize },

    #[error("row {row} of step {step} is not strictly diagonally dominant (margin {margin:e})")]
    LostDominance { step: usize, row: usize, margin: f64 },

    #[error("quadrature did not converge: error estimate {estimate:e} after {intervals} subintervals")]
    QuadratureNotConverged { estimate: f64, intervals: usize },

    #[error("history is empty")]
    EmptyHistory,

    #[error("invalid convergence data: {0}")]
    InvalidConvergenceData(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("{0}")]
    SchemeMismatch(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid study plan: {0}")]
    InvalidPlan(String),

    #[error("could not start worker threads: {0}")]
    ThreadPool(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context { context: context.into(), source: Box::new(self) }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
