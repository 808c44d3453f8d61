use thiserror::Error;

/// Errors produced by the divergence toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("metric violation: {0}")]
    MetricViolation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("measures live on different spaces")]
    SpaceMismatch,

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("support [{lo}, {hi}] does not intersect any grid cell")]
    EmptySupport { lo: f64, hi: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown generator: {0}")]
    UnknownGenerator(String),

    #[error("generator {0} is not supported by this engine")]
    UnsupportedGenerator(String),

    #[error("start point is infeasible")]
    InfeasibleStart,

    #[error("iteration limit reached after {iters} iterations (residual {residual:e})")]
    IterationLimit { iters: usize, residual: f64 },

    #[error("margin {margin} exceeds the largest attainable moment deviation {max_deviation}")]
    InfeasibleMargin { margin: f64, max_deviation: f64 },

    #[error("solver failure: {0}")]
    SolverFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
