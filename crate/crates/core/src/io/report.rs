use super::{Provenance, RunConfig};
use crate::model::DerivedConstants;
use crate::verdict::{Outcome, Verdict};
use crate::Result;
use serde::Serialize;
use serde_json::Value;

/// JSON Schema shared by every JSON output.
pub const REPORT_SCHEMA: &str = include_str!("../../schema/report.schema.json");

/// Common envelope of JSON outputs. Audit reports also carry `overall`,
/// `statement` and `thresholds`.
#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub kind: String,
    pub provenance: Provenance,
    pub config: RunConfig,
    pub constants: DerivedConstants,
    pub horizon: Value,
    pub verdicts: Vec<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub overall: Option<Outcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statement: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Value>,
    pub data: T,
}

impl<T: Serialize> Report<T> {
    pub fn new(kind: &str, config: &RunConfig, constants: DerivedConstants, horizon: Value, data: T) -> Self {
        Self {
            kind: kind.into(),
            provenance: Provenance::new(config),
            config: config.canonical(),
            constants,
            horizon,
            verdicts: Vec::new(),
            overall: None,
            statement: None,
            thresholds: None,
            data,
        }
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}
