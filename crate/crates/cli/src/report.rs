//! The machine-readable run report.

use serde::{Deserialize, Serialize};

/// Bumped whenever a field is renamed or its meaning changes.
pub const SCHEMA: &str = "curspca.run-report.v1";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub err_reg: Option<f64>,
    pub err_pca: Option<f64>,
    pub precision: Option<f64>,
    pub active_count: Option<usize>,
    pub objective_final: Option<f64>,
    pub kkt_residual: Option<f64>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub command: String,
    /// The parsed command line.
    pub config: serde_json::Value,
    pub metrics: Metrics,
    /// Wall-clock time; the only field that varies between identical runs.
    pub timing_ms: u64,
    pub seed: Option<u64>,
    /// Command-specific extras: tuning probes, per-trial outcomes, diagnostics.
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub details: serde_json::Value,
}

impl RunReport {
    pub fn new(command: &str, config: serde_json::Value, metrics: Metrics, seed: Option<u64>) -> Self {
        Self {
            schema: SCHEMA.to_string(),
            command: command.to_string(),
            config,
            metrics,
            timing_ms: 0,
            seed,
            details: serde_json::Value::Null,
        }
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report is plain data");
        text.push('\n');
        text
    }
}
