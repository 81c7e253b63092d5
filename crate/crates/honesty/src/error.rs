use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("validation: {0}")]
    Validation(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("map is not trace preserving (deficit norm {deficit:.3e})")]
    NotTracePreserving { deficit: f64 },

    #[error("map is not completely positive (most negative Choi eigenvalue {min_eig:.3e})")]
    NotCompletelyPositive { min_eig: f64 },

    #[error("no feasible point found (best infeasibility {best:.3e})")]
    Infeasible { best: f64 },

    #[error("solver did not converge after {iterations} iterations (last gap {gap:.3e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
