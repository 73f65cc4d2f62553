use thiserror::Error;

pub type Result<T> = std::result::Result<T, ExpError>;

#[derive(Debug, Error)]
pub enum ExpError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Solver(#[from] ladmm::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("trace error: {0}")]
    Csv(#[from] csv::Error),

    #[error("report error: {0}")]
    Json(#[from] serde_json::Error),
}

impl ExpError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExpError::Solver(ladmm::Error::Invariant { .. } | ladmm::Error::NonFinite(_)) => 4,
            ExpError::Solver(ladmm::Error::SpectralNonConvergence { .. }) => 4,
            ExpError::Io(_) | ExpError::Csv(_) | ExpError::Json(_) => 1,
            _ => 3,
        }
    }
}
