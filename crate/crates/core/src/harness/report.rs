//! Report documents and the files a run leaves behind.

use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

use super::config::{RunConfig, Subcommand};
use crate::error::Result;

/// One gated check with free-form numeric details.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    #[serde(flatten)]
    pub details: Map<String, Value>,
}

impl CheckResult {
    pub fn new(name: impl Into<String>, pass: bool) -> Self {
        Self { name: name.into(), pass, details: Map::new() }
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.details.insert(key.to_string(), v);
        self
    }

    /// Passes when `value <= tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self::new(name, value <= tolerance).with("value", value).with("tolerance", tolerance)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub subcommand: Subcommand,
    pub config_echo: RunConfig,
    pub results: Vec<CheckResult>,
    pub pass: bool,
}

impl Report {
    pub fn new(config: &RunConfig, results: Vec<CheckResult>) -> Self {
        let pass = !results.is_empty() && results.iter().all(|r| r.pass);
        Self { subcommand: config.subcommand, config_echo: config.clone(), results, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| !r.pass)
    }
}

/// Report plus named auxiliary files (CSV traces, sidecars, dumps).
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub report: Report,
    pub files: Vec<(String, Vec<u8>)>,
}

impl RunOutput {
    pub fn report_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.report)?)
    }

    pub fn file(&self, name: &str) -> Option<&[u8]> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, b)| b.as_slice())
    }

    /// Writes `report.json` and every auxiliary file into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, bytes) in &self.files {
            std::fs::write(dir.join(name), bytes)?;
        }
        std::fs::write(dir.join("report.json"), self.report_json()? + "\n")?;
        Ok(())
    }
}
