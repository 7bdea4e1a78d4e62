use alloc::string::String;

/// Errors raised by the solver core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    /// Alternating projections or an eigensolver ran out of iterations.
    #[error("no convergence after {iterations} iterations (residuals {residual_a:.3e}, {residual_b:.3e})")]
    NonConvergence {
        iterations: usize,
        residual_a: f64,
        residual_b: f64,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A candidate solution violates a constraint of the TCTB problem.
    #[error("infeasible solution: {0}")]
    Infeasible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::NotHermitian { .. }
                | Error::Config(_)
                | Error::Infeasible(_)
                | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;
