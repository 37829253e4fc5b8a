use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::rng::SeedPolicy;

pub const CRATE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// A single numeric check: `|value - target| <= tolerance` unless the check
/// carries its own pass flag (one-sided bounds, orderings).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    pub fn within(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            target,
            tolerance,
            pass: (value - target).abs() <= tolerance,
        }
    }

    /// Passes when `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, target: bound, tolerance: 0.0, pass: value >= bound }
    }

    /// Passes when `value < bound`.
    pub fn below(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self { name: name.into(), value, target: bound, tolerance: 0.0, pass: value < bound }
    }

    pub fn flag(name: impl Into<String>, value: f64, target: f64, pass: bool) -> Self {
        Self { name: name.into(), value, target, tolerance: 0.0, pass }
    }
}

/// Tabular and structured output of one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub command: String,
    pub version: String,
    pub seeds: SeedPolicy,
    pub grid: Vec<u64>,
    pub horizon: f64,
    pub replications: usize,
    pub checks: Vec<CheckResult>,
    /// Command-specific tables and statistics.
    pub details: Value,
}

impl ExperimentReport {
    pub fn new(command: impl Into<String>, seeds: SeedPolicy, grid: Vec<u64>, horizon: f64, replications: usize) -> Self {
        Self {
            command: command.into(),
            version: CRATE_VERSION.to_string(),
            seeds,
            grid,
            horizon,
            replications,
            checks: Vec::new(),
            details: Value::Object(Default::default()),
        }
    }

    pub fn push_check(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn set_detail(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        if let Value::Object(map) = &mut self.details {
            map.insert(key.to_string(), v);
        }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned plain-text table of the checks with a header block.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command      {}", self.command);
        let _ = writeln!(out, "version      {}", self.version);
        let _ = writeln!(out, "master_seed  {}", self.seeds.master_seed);
        let _ = writeln!(out, "stream_id    {}", self.seeds.stream_id);
        let grid: Vec<String> = self.grid.iter().map(u64::to_string).collect();
        let _ = writeln!(out, "grid         {}", grid.join(","));
        let _ = writeln!(out, "horizon      {}", self.horizon);
        let _ = writeln!(out, "replications {}", self.replications);
        if self.checks.is_empty() {
            return out;
        }
        let w = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
        let _ = writeln!(out);
        let _ = writeln!(out, "{:<w$}  {:>14}  {:>14}  {:>10}  result", "check", "value", "target", "tolerance");
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{:<w$}  {:>14.6e}  {:>14.6e}  {:>10.3e}  {}",
                c.name,
                c.value,
                c.target,
                c.tolerance,
                if c.pass { "pass" } else { "FAIL" }
            );
        }
        out
    }
}
