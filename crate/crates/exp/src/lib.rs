//! Reproduction harness for the parallel linearized ADMM: seeded instance
//! generation, experiment runs, CSV traces, JSON reports and the `ladmm` CLI.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiment;
pub mod instances;
pub mod report;
pub mod rng;
pub mod trace;

pub use config::{IntProgConfig, LassoConfig, ParamChoice, QuadraticTarget};
pub use error::{ExpError, Result};
pub use report::RunReport;
pub use trace::{TraceRow, TRACE_COLUMNS};
