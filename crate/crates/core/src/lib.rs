//! Multi-block parallel linearized ADMM for nonconvex, nonsmooth problems
//!
//! ```text
//!   minimize   g(x, y) + Σ_i f_i(x_i) + h(y)
//!   subject to Σ_i A_i x_i + B y = 0
//! ```
//!
//! with `g`, `h` smooth and each `f_i` proper and lower semicontinuous with a
//! computable proximal map. The [`certify`] module derives step parameters
//! that make the augmented Lagrangian a Lyapunov function; the [`solver`]
//! module runs the iteration and reports per-step diagnostics.

pub mod certify;
pub mod error;
pub mod linalg;
pub mod model;
pub mod prox;
pub mod solver;

pub use certify::{
    check_range_inclusion, derive_parameters, min_eigenvalue_gram, top_eigenvalue_gram,
    validate_parameters, Certificate, SpectralConstants, Violation,
};
pub use error::{Error, Result};
pub use linalg::Matrix;
pub use model::{
    evaluate_lagrangian, evaluate_objective, residuals, IterateState, ProblemSpec, ProxOracle,
    Residuals, SmoothOracle,
};
pub use solver::{
    run, DiagLevel, DiagnosticsRecord, GapMode, Lemma, RunOptions, RunOutcome, StoppingRule,
    Termination,
};
