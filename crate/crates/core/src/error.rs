use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("precondition violated: {0}")]
    PreconditionViolated(&'static str),

    #[error("classification is ambiguous at tolerance {tol:e} (residual {residual:e} on degree {degree})")]
    AmbiguousClassification { degree: usize, residual: f64, tol: f64 },

    #[error("polynomial is exceptional; escape constants need Re(a_d i^d) != 0")]
    NotNonExceptional,

    #[error("orbit escaped past the overflow guard at step {step}")]
    Escaped { step: usize },

    #[error("green function estimate did not converge (last change {change:e})")]
    NotConverged { change: f64 },

    #[error("point lies outside the Böttcher domain (potential {potential} <= {level})")]
    OutsideDomain { potential: f64, level: f64 },

    #[error("Böttcher product passed within the branch-cut guard")]
    BranchAmbiguity,

    #[error("Newton continuation diverged after {traced} ray points (last good point {last_re} + {last_im}i)")]
    NewtonDiverged { traced: usize, last_re: f64, last_im: f64 },

    #[error("root solve failed: residual {residual:e} exceeds bound")]
    RootSolveFailed { residual: f64 },

    #[error("real root isolation could not certify all roots")]
    RootIsolationFailed,

    #[error("the vertical line through the base point is mapped into a vertical line; mirrors form a continuum")]
    InvariantLine,

    #[error("base point does not escape; green level diagnostic needs g > 0")]
    NotEscaping,

    #[error("separated-set counts saturate at the sample size before a linear regime appears")]
    InsufficientSample,
}
