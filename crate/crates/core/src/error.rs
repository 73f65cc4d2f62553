use thiserror::Error;

use crate::solver::Lemma;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    Dimension {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid state: {0}")]
    State(&'static str),

    #[error("power iteration did not converge after {iterations} iterations (last estimate {estimate})")]
    SpectralNonConvergence { iterations: usize, estimate: f64 },

    #[error("matrix is not of full column rank (smallest Gram eigenvalue {min_eigenvalue:e}, largest {max_eigenvalue:e})")]
    RankDeficient {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    #[error("matrix is not positive definite (pivot {pivot} is {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("{lemma} violated at iteration {iter}: value {value:e} below tolerance {tolerance:e}")]
    Invariant {
        lemma: Lemma,
        iter: usize,
        value: f64,
        tolerance: f64,
    },
}
