use thiserror::Error;

/// Errors raised by the model layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("state has {got} components, model expects {expected}")]
    WrongSize { expected: usize, got: usize },
    #[error("inadmissible state: {constraint} (value {value})")]
    Inadmissible { constraint: &'static str, value: f64 },
    #[error("compact box is invalid: {0}")]
    InvalidBox(String),
    #[error("entropy Hessian is not positive definite at {state:?}")]
    NotConvex { state: Vec<f64> },
}

/// Errors from the characteristic-tracing reference solution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("t = {t} is not below the shock formation time {shock_time}")]
    PastShock { t: f64, shock_time: f64 },
    #[error("characteristic foot did not converge at x = {x} (residual {residual:e})")]
    NoConvergence { x: f64, residual: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShapeError {
    #[error("{what}: expected {expected}, got {got}")]
    Mismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{0}")]
    Incompatible(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("state left the admissible set at t = {time}, cell {cell}: {source}")]
    Inadmissible {
        time: f64,
        cell: usize,
        #[source]
        source: ModelError,
    },
    #[error("time step {dt} at t = {time} violates the CFL limit {limit}")]
    CflViolation { time: f64, dt: f64, limit: f64 },
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{flagged} of {total} stochastic samples had inadmissible assembled states")]
    TooManyInadmissible { flagged: usize, total: usize },
    #[error("invalid estimator input: {0}")]
    Config(String),
}
