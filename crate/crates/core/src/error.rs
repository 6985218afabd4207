use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A malformed or missing argument.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Cholesky factorization failed at every rung of the jitter ladder.
    #[error("covariance matrix is ill-conditioned; factorization failed with relative jitter {ladder:?}")]
    IllConditioned { ladder: Vec<f64> },

    #[error("chain stuck: {rejected} consecutive rejections at iteration {iteration} (acceptance so far {acceptance:.4})")]
    StuckChain {
        iteration: usize,
        rejected: usize,
        acceptance: f64,
    },

    #[error("enumeration of {required} subsets exceeds the guard of {limit}; rerun with `{flag}`")]
    EnumerationGuard {
        required: u128,
        limit: u128,
        flag: &'static str,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
