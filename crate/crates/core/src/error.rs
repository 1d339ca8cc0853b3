use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("constraint matrix is rank deficient (pivot {pivot:.3e} below tolerance {tol:.3e})")]
    RankDeficient { pivot: f64, tol: f64 },

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("no assumption case holds: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("beta is undefined: relaxation {0} is outside (0, 2)")]
    BetaDomain(f64),

    #[error("invalid line search setup: {0}")]
    InvalidLineSearch(String),

    #[error("stale affine cache: built for iteration {cached}, used at iteration {current}")]
    StaleCache { cached: usize, current: usize },

    #[error("unsupported cone for dual: {0}")]
    UnsupportedCone(String),

    #[error("invalid problem data: {0}")]
    InvalidProblem(String),

    #[error("no records to write")]
    EmptyRecords,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
