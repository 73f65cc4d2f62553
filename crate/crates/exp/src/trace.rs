//! Per-iteration CSV traces.

use std::io::Write;
use std::path::Path;

use ladmm::DiagnosticsRecord;
use serde::{Deserialize, Serialize};

use crate::error::Result;

pub const TRACE_COLUMNS: [&str; 13] = [
    "iter",
    "L_beta",
    "m_k",
    "objective",
    "dx",
    "dy",
    "dgamma",
    "feas",
    "kkt_x",
    "kkt_y",
    "slack_x",
    "slack_y",
    "slack_gamma",
];

/// One trace line. Floats are written in shortest round-trip form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    #[serde(rename = "L_beta")]
    pub l_beta: f64,
    pub m_k: f64,
    pub objective: f64,
    pub dx: f64,
    pub dy: f64,
    pub dgamma: f64,
    pub feas: f64,
    pub kkt_x: f64,
    pub kkt_y: f64,
    pub slack_x: f64,
    pub slack_y: f64,
    pub slack_gamma: f64,
}

impl From<&DiagnosticsRecord> for TraceRow {
    fn from(r: &DiagnosticsRecord) -> Self {
        TraceRow {
            iter: r.iter,
            l_beta: r.l_beta,
            m_k: r.m_k,
            objective: r.objective,
            dx: r.dx,
            dy: r.dy,
            dgamma: r.dgamma,
            feas: r.feas,
            kkt_x: r.kkt_x,
            kkt_y: r.kkt_y,
            slack_x: r.slack_x,
            slack_y: r.slack_y,
            slack_gamma: r.slack_gamma,
        }
    }
}

impl TraceRow {
    /// Maximum variable gap `max(‖Δx‖, ‖Δy‖, ‖Ax + By‖)`.
    pub fn max_variable_gap(&self) -> f64 {
        self.dx.max(self.dy).max(self.feas)
    }

    /// Values in column order, for column-wise comparison.
    pub fn values(&self) -> [f64; 13] {
        [
            self.iter as f64,
            self.l_beta,
            self.m_k,
            self.objective,
            self.dx,
            self.dy,
            self.dgamma,
            self.feas,
            self.kkt_x,
            self.kkt_y,
            self.slack_x,
            self.slack_y,
            self.slack_gamma,
        ]
    }
}

pub struct TraceWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(w: W) -> Self {
        TraceWriter {
            inner: csv::Writer::from_writer(w),
        }
    }

    pub fn write(&mut self, record: &DiagnosticsRecord) -> Result<()> {
        self.inner.serialize(TraceRow::from(record))?;
        Ok(())
    }

    pub fn finish(mut self) -> Result<W> {
        self.inner.flush()?;
        self.inner
            .into_inner()
            .map_err(|e| crate::error::ExpError::Io(e.into_error()))
    }
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let rows = rdr.deserialize().collect::<std::result::Result<Vec<TraceRow>, _>>()?;
    Ok(rows)
}
