use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("quadrature budget exceeded after {subdivisions} subdivisions (estimate {estimate:e}, error {error:e})")]
    QuadratureBudget {
        subdivisions: usize,
        estimate: f64,
        error: f64,
    },

    #[error("non-finite integrand at t = {0:e}")]
    NonFiniteIntegrand(f64),

    #[error("non-finite objective value at {0}")]
    NonFiniteObjective(String),

    #[error("surface quadrature did not converge: {0}")]
    SurfaceQuadrature(String),

    #[error("hypotheses not met: {0}")]
    HypothesisNotMet(String),

    #[error("degenerate bound: {0}")]
    Degenerate(String),

    #[error("unsupported body: {0}")]
    UnsupportedBody(String),

    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

impl Error {
    /// `true` for failures of a numerical kernel rather than of the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureBudget { .. }
                | Error::NonFiniteIntegrand(_)
                | Error::NonFiniteObjective(_)
                | Error::SurfaceQuadrature(_)
                | Error::InvariantViolated(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
