use thiserror::Error;

/// Errors raised by the solvers, lattice evolutions and samplers.
#[derive(Debug, Error)]
pub enum SirError {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A lattice window would exceed the configured site budget.
    #[error("window of {requested} sites exceeds the limit of {limit} sites")]
    Resource { requested: usize, limit: usize },

    /// An iterative solve did not reach its tolerance.
    #[error("no convergence after {iterations} iterations (residual gap {gap:e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SirError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(SirError::Domain(msg.into()))
}
