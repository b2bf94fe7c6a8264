use thiserror::Error;

use crate::wave::ConvergenceTrace;

/// Errors raised anywhere in the solver suite.
///
/// Iterative failures carry the convergence trace so that callers can
/// persist it (the CLI writes it next to the archive on exit code 2).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("elliptic modulus {kappa} out of range ({reason})")]
    ModulusOutOfRange { kappa: f64, reason: &'static str },

    #[error("iteration limit of {iters} reached without convergence")]
    MaxItersExceeded { iters: usize, trace: ConvergenceTrace },

    #[error("iteration diverged after {iters} steps")]
    DivergenceDetected { iters: usize, trace: ConvergenceTrace },

    #[error("speed recovery is singular (denominator {denominator:e})")]
    SingularSpeed { denominator: f64 },

    #[error("solution failed post-hoc validation: {0}")]
    ValidationFailed(String),

    #[error("target speed {target} is not reachable on the w > 1 branch")]
    SpeedUnreachable { target: f64 },

    #[error("Newton linear solve failed: Jacobian is singular")]
    SingularJacobian,

    #[error("symmetric eigensolver failed to converge")]
    EigenFailure,

    #[error("continuation stencil is not equally spaced or mixes methods")]
    InconsistentSpacing,

    #[error("indicator d = {d:e} is degenerate (fold point)")]
    DegenerateD { d: f64 },

    #[error("solution blew up at t = {t} (sup norm {sup_norm:e})")]
    BlowupDetected { t: f64, sup_norm: f64 },
}

impl Error {
    /// Trace attached to an iterative failure, if any.
    pub fn trace(&self) -> Option<&ConvergenceTrace> {
        match self {
            Error::MaxItersExceeded { trace, .. } | Error::DivergenceDetected { trace, .. } => Some(trace),
            _ => None,
        }
    }

    /// True for errors caused by a bad input rather than a solver failure.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. } | Error::ModulusOutOfRange { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        field,
        reason: reason.into(),
    }
}
