use thiserror::Error;

use crate::geometry::ShootingParams;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Two bodies came closer than the configured minimum distance.
    #[error("trajectory failure at t = {t}: pair distance {distance:.3e} below minimum")]
    Trajectory { t: f64, distance: f64 },

    #[error("step size underflow at t = {t} (h = {h:.3e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("step budget of {max_steps} exhausted at t = {t}")]
    StepBudget { t: f64, max_steps: usize },

    #[error("no collinear event before t_max = {t_max}")]
    EventNotFound { t_max: f64 },

    #[error("newton iteration did not converge after {iterations} iterations (best |F| = {residual_norm:.3e} at {best:?})")]
    Divergence {
        best: ShootingParams,
        residual_norm: f64,
        iterations: usize,
    },

    #[error("jacobian is singular to working precision at {at:?}")]
    SingularJacobian { at: ShootingParams },

    #[error("evaluation failed at {params:?}: {source}")]
    AtIterate {
        params: ShootingParams,
        #[source]
        source: Box<Error>,
    },

    #[error("not found: {0}")]
    NotFound(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("consistency error: {0}")]
    Consistency(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Strips [`Error::AtIterate`] wrappers.
    pub fn root_cause(&self) -> &Error {
        match self {
            Error::AtIterate { source, .. } => source.root_cause(),
            other => other,
        }
    }

    /// True for failures of the numerical integration itself.
    pub fn is_integration_failure(&self) -> bool {
        matches!(
            self.root_cause(),
            Error::Trajectory { .. } | Error::StepUnderflow { .. } | Error::StepBudget { .. } | Error::EventNotFound { .. }
        )
    }
}
