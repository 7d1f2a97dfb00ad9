use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::Result;

/// One point of a rejection/error tradeoff curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub threshold: f64,
    pub rej_p: f64,
    /// Selected test points misclassified, over all test points; needs test labels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub err_q: Option<f64>,
    pub rej_q: f64,
}

/// Output of a run: config echo, per-round diagnostics, metrics, optional
/// tradeoff curve and the serialized artifacts (models, selection sets).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub command: String,
    pub config: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rounds: Vec<Value>,
    pub metrics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tradeoff: Vec<TradeoffRow>,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub artifacts: Value,
}

impl ResultsDocument {
    pub fn new(command: impl Into<String>, config: Value) -> Self {
        ResultsDocument {
            command: command.into(),
            config,
            ..Default::default()
        }
    }

    pub fn metric(&mut self, name: &str, value: f64) -> &mut Self {
        self.metrics.insert(name.to_string(), value);
        self
    }

    pub fn to_text(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

pub fn save_results(path: impl AsRef<Path>, doc: &ResultsDocument) -> Result<()> {
    std::fs::write(path, doc.to_text()?)?;
    Ok(())
}

pub fn load_results(path: impl AsRef<Path>) -> Result<ResultsDocument> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}
