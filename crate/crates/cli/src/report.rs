//! The evaluation report file: a run manifest plus one report per dataset.

use linkforge::eval::EvalReport;
use serde::{Deserialize, Serialize};

/// What was run, when, and with which configuration. Written once, together
/// with the reports that reference it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub run_id: String,
    /// RFC 3339, UTC.
    pub created_at: String,
    pub engine_version: String,
    pub config: serde_json::Value,
    pub corpora: Vec<CorpusRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusRef {
    pub name: String,
    pub path: String,
    pub documents: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetReport {
    pub run_id: String,
    #[serde(flatten)]
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub manifest: RunManifest,
    pub datasets: Vec<DatasetReport>,
    /// Mean of the per-dataset micro-F1 values.
    pub average_micro_f1: Option<f64>,
}

/// A run id unique enough for local bookkeeping: UTC time plus process id.
pub fn new_run_id(now: chrono::DateTime<chrono::Utc>) -> String {
    format!("{}-{}", now.format("%Y%m%dT%H%M%S%.3fZ"), std::process::id())
}
