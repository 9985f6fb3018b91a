use thiserror::Error;

use crate::dynamics::SingularityKind;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("curvature must be nonzero")]
    ZeroCurvature,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("singular configuration: {0}")]
    Singularity(SingularityKind),

    #[error("class mismatch: {0}")]
    ClassMismatch(String),

    #[error("step size underflow at t = {t}: h = {h:e}")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("step limit of {max_steps} reached at t = {t}")]
    StepLimit { t: f64, max_steps: usize },

    #[error("bodies {i} and {j} approached a singularity at t = {t}")]
    SingularityApproach { i: usize, j: usize, t: f64 },

    #[error("at least {needed} samples required, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("bodies {i} and {j} are antipodal")]
    SingularConfiguration { i: usize, j: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
