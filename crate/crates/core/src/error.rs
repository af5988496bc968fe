use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The inputs do not satisfy the hypotheses a result relies on.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// Side lengths that cannot close into a planar polygon.
    #[error("polygon inequality fails: sum {sum} < 2 * max {max}")]
    PolygonInequality { sum: f64, max: f64 },

    /// A brute-force search larger than the supported limits.
    #[error("instance too large for exhaustive search: {0}")]
    SizeLimit(String),

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue} below -{tolerance}")]
    NotPsd { min_eigenvalue: f64, tolerance: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
