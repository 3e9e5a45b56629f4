use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("out of range: {0}")]
    Range(String),

    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    /// An iterative routine hit its cap. `best_bound` is the best value
    /// reached so it is never mistaken for a converged answer.
    #[error("no convergence after {iterations} iterations (best bound {best_bound:e})")]
    NonConvergence { iterations: usize, best_bound: f64 },

    #[error("ill-conditioned design matrix (condition number {condition:e}); try a different epsilon grid")]
    IllConditioned { condition: f64 },

    #[error("covering hypothesis violated: {0}")]
    NotCovered(String),

    #[error("constant-width certificate failed: |w(u) - {declared}| = {deviation:e} at u = {direction:?}")]
    WidthCertificate {
        declared: f64,
        deviation: f64,
        direction: Vec<f64>,
    },

    #[error("no feasible covering curve found; least infeasible candidate has deficit {deficit:e} and length {length}")]
    Infeasible {
        deficit: f64,
        length: f64,
        candidate: Vec<Vec<f64>>,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
