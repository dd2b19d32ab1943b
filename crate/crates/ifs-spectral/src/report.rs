//! The JSON run report printed by every command.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::reference::ReferenceCheck;

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputInfo {
    pub path: String,
    /// SHA-256 of the file bytes, lowercase hex.
    pub sha256: String,
    pub dim: usize,
    pub maps: usize,
    pub kind: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub input: InputInfo,
    pub parameters: BTreeMap<String, Value>,
    /// `ok`, or the soft or hard outcome that ended the run.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub results: Value,
    #[serde(default)]
    pub reference: Vec<ReferenceCheck>,
    #[serde(default)]
    pub warnings: Vec<String>,
    /// Files written, in order.
    #[serde(default)]
    pub outputs: Vec<String>,
    /// Wall-clock milliseconds per phase; the only nondeterministic field.
    #[serde(default)]
    pub timings_ms: BTreeMap<String, f64>,
}

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl RunReport {
    pub fn new(command: &str, input: InputInfo) -> RunReport {
        RunReport {
            tool: TOOL.to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            input,
            parameters: BTreeMap::new(),
            status: "ok".to_string(),
            message: None,
            results: Value::Object(Default::default()),
            reference: Vec::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.parameters.insert(key.to_string(), value.into());
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report values are finite");
        s.push('\n');
        s
    }

    /// The report with timings cleared, for comparing runs.
    pub fn without_timings(&self) -> RunReport {
        RunReport {
            timings_ms: BTreeMap::new(),
            ..self.clone()
        }
    }
}

/// JSON number, or `null` for values JSON cannot carry.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}
