use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Newton iteration for the multiplier pair did not reach tolerance.
    #[error("solver failed after {iterations} iterations (residual R-a = {residual_r:e}, I-b = {residual_i:e})")]
    SolverFailure {
        iterations: usize,
        residual_r: f64,
        residual_i: f64,
    },

    /// The requested (dimension, representation) combination is not supported.
    #[error("unsupported: {0}")]
    Capability(String),

    /// The discretized feasible set has no strictly interior point.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A geometric construction produced an impossible result.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
