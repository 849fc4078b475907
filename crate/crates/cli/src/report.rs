//! Machine-readable run reports.

use std::path::Path;
use std::time::Instant;

use cmdnls_core::io::{json_number, normalize_numbers, to_json_string, write_text};
use serde_json::{Map, Value};

use crate::config::{usage, UsageError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `measured` is finite and at most `tolerance`.
    pub fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        let status = if measured.is_finite() && measured <= tolerance { Status::Pass } else { Status::Fail };
        Self { name: name.into(), status, measured: Some(measured), tolerance: Some(tolerance), detail: None }
    }

    pub fn equals(name: impl Into<String>, measured: usize, expected: usize) -> Self {
        let status = if measured == expected { Status::Pass } else { Status::Fail };
        Self {
            name: name.into(),
            status,
            measured: Some(measured as f64),
            tolerance: Some(0.0),
            detail: Some(format!("expected {expected}")),
        }
    }

    pub fn failed(name: impl Into<String>, why: impl std::fmt::Display) -> Self {
        Self { name: name.into(), status: Status::Fail, measured: None, tolerance: None, detail: Some(why.to_string()) }
    }

    pub fn skipped(name: impl Into<String>, why: impl std::fmt::Display) -> Self {
        Self { name: name.into(), status: Status::Skipped, measured: None, tolerance: None, detail: Some(why.to_string()) }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::from(self.name.clone()));
        m.insert("status".into(), Value::from(self.status.name()));
        m.insert("measured".into(), self.measured.map_or(Value::Null, json_number));
        m.insert("tolerance".into(), self.tolerance.map_or(Value::Null, json_number));
        if let Some(d) = &self.detail {
            m.insert("detail".into(), Value::from(d.clone()));
        }
        Value::Object(m)
    }
}

/// Report of one command run. Wall times are kept out of `report.json` so that
/// repeated runs produce identical bytes; they go to `timing.json`.
pub struct Report {
    command: &'static str,
    seed: u64,
    config: Value,
    checks: Vec<Check>,
    timings: Vec<(String, f64)>,
    artifacts: Vec<String>,
    event: Option<String>,
    started: Instant,
}

impl Report {
    pub fn new(command: &'static str, seed: u64, config: Value) -> Self {
        Self {
            command,
            seed,
            config: normalize_numbers(config),
            checks: Vec::new(),
            timings: Vec::new(),
            artifacts: Vec::new(),
            event: None,
            started: Instant::now(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
    }

    /// Runs `f`, records its wall time under `label` and pushes its checks.
    pub fn timed(&mut self, label: &str, f: impl FnOnce() -> Vec<Check>) {
        let t = Instant::now();
        let checks = f();
        self.timings.push((label.to_string(), t.elapsed().as_secs_f64()));
        self.checks.extend(checks);
    }

    pub fn record_time(&mut self, label: &str, secs: f64) {
        self.timings.push((label.to_string(), secs));
    }

    pub fn set_event(&mut self, event: impl Into<String>) {
        self.event = Some(event.into());
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// Writes `text` to `dir/name` and records it as an artifact.
    pub fn write(&mut self, dir: &Path, name: &str, text: &str) -> Result<(), UsageError> {
        write_text(&dir.join(name), text).map_err(|e| usage(e.to_string()))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), Value::from(self.command));
        m.insert("status".into(), Value::from(if self.passed() { "pass" } else { "fail" }));
        m.insert("seed".into(), Value::from(self.seed));
        m.insert("config".into(), self.config.clone());
        m.insert("event".into(), self.event.clone().map_or(Value::Null, Value::from));
        m.insert("checks".into(), Value::Array(self.checks.iter().map(Check::to_json).collect()));
        let mut files = self.artifacts.clone();
        files.push("report.json".into());
        files.push("timing.json".into());
        m.insert("artifacts".into(), Value::Array(files.into_iter().map(Value::from).collect()));
        Value::Object(m)
    }

    /// Writes `report.json` and `timing.json` into `dir`.
    pub fn finish(mut self, dir: &Path) -> Result<Value, UsageError> {
        let doc = self.to_json();
        self.write(dir, "report.json", &to_json_string(&doc))?;
        let mut t = Map::new();
        for (label, secs) in &self.timings {
            t.insert(label.clone(), json_number(*secs));
        }
        t.insert("total".into(), json_number(self.started.elapsed().as_secs_f64()));
        let mut m = Map::new();
        m.insert("command".into(), Value::from(self.command));
        m.insert("wall_time_s".into(), Value::Object(t));
        self.write(dir, "timing.json", &to_json_string(&Value::Object(m)))?;
        Ok(doc)
    }
}
