use std::path::Path;

use ladmm::{Certificate, DiagnosticsRecord, Termination};
use serde::{Deserialize, Serialize};

use crate::config::{IntProgConfig, LassoConfig};
use crate::error::Result;
use crate::rng::GENERATOR_NAME;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FinalResiduals {
    pub dx: f64,
    pub dy: f64,
    pub dgamma: f64,
    pub feas: f64,
    pub kkt_x: f64,
    pub kkt_y: f64,
    pub objective: f64,
}

impl From<&DiagnosticsRecord> for FinalResiduals {
    fn from(r: &DiagnosticsRecord) -> Self {
        FinalResiduals {
            dx: r.dx,
            dy: r.dy,
            dgamma: r.dgamma,
            feas: r.feas,
            kkt_x: r.kkt_x,
            kkt_y: r.kkt_y,
            objective: r.objective,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "problem", rename_all = "snake_case")]
pub enum ConfigEcho {
    Lasso(LassoConfig),
    Intprog(IntProgConfig),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub termination: Termination,
    pub iterations: usize,
    #[serde(rename = "final")]
    pub final_residuals: FinalResiduals,
    pub certified: bool,
    pub certificate: Certificate,
    pub seed: u64,
    pub generator: String,
    pub config: ConfigEcho,
    pub trace_path: Option<String>,
    /// Terminal `x`, included for small problems.
    pub solution: Option<Vec<f64>>,
    pub elapsed_seconds: Option<f64>,
}

impl RunReport {
    pub fn new(
        config: ConfigEcho,
        seed: u64,
        certificate: Certificate,
        termination: Termination,
        iterations: usize,
        last: &DiagnosticsRecord,
    ) -> Self {
        RunReport {
            termination,
            iterations,
            final_residuals: FinalResiduals::from(last),
            certified: certificate.certified,
            certificate,
            seed,
            generator: GENERATOR_NAME.to_string(),
            config,
            trace_path: None,
            solution: None,
            elapsed_seconds: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}
