use thiserror::Error;

/// Errors raised by the estimation, modelling and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum TailError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("sample too small: need at least {needed} values, got {got}")]
    Size { needed: usize, got: usize },

    /// Input data is unusable (non-finite values, too few valid rows).
    #[error("data error: {0}")]
    Data(String),

    /// `k` (or a k-range) incompatible with the sample size.
    #[error("range error: {0}")]
    Range(String),

    /// The threshold order statistic `X_{n-k,n}` must be positive for the log-spacings.
    #[error("threshold X(n-k,n) = {threshold} is not positive at k = {k}")]
    Positivity { k: usize, threshold: f64 },

    #[error("quadrature did not converge: estimated error {achieved:e} exceeds target {target:e}")]
    Numeric { achieved: f64, target: f64 },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("invalid model specification: {0}")]
    ModelSpec(String),

    #[error("replication {replication}: {source}")]
    Replication {
        replication: usize,
        #[source]
        source: Box<TailError>,
    },
}

pub type Result<T> = std::result::Result<T, TailError>;
