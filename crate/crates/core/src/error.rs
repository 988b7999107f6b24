use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("need at least {min} observations, got {n}")]
    TooFewObservations { n: usize, min: usize },

    /// The covariance estimate is not positive definite, so log-det based
    /// statistics are undefined. Typically `p ≥ n`.
    #[error("singular covariance (p = {p}, n = {n}): {reason}")]
    SingularCovariance { p: usize, n: usize, reason: String },

    /// A limiting law was requested outside the ratio range where it holds.
    #[error("dimension ratio y = {y} outside the valid range {range}")]
    DegenerateRatio { y: f64, range: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("contour passes within {distance:.3e} of singular point {point} (need {required:.3e})")]
    ContourTooClose {
        point: f64,
        distance: f64,
        required: f64,
    },

    #[error("quadrature did not converge: last change {change:.3e} at {nodes} nodes")]
    NonConvergent { change: f64, nodes: usize },

    #[error("replication {replication} of cell (p = {p}, n = {n}) failed: {source}")]
    Replication {
        p: usize,
        n: usize,
        replication: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("schema: {0}")]
    Schema(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
