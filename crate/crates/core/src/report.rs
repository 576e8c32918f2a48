//! Versioned verification reports.

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Case {
    pub key: String,
    pub inputs: Value,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Case {
    /// `pass` is set to `expected == actual`.
    pub fn new(key: impl Into<String>, inputs: Value, expected: Value, actual: Value) -> Self {
        let pass = expected == actual;
        Case { key: key.into(), inputs, expected, actual, pass, note: None }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skipped {
    pub key: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub suite: String,
    pub config: Value,
    pub cases: Vec<Case>,
    pub skipped: Vec<Skipped>,
    pub summary: Summary,
    /// Set when a resource limit cut the run short.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncated: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl Report {
    /// Sorts cases and skips by key and fills in the summary.
    pub fn new(suite: &str, config: Value, mut cases: Vec<Case>, mut skipped: Vec<Skipped>) -> Self {
        cases.sort_by(|a, b| a.key.cmp(&b.key));
        skipped.sort_by(|a, b| a.key.cmp(&b.key));
        let passed = cases.iter().filter(|c| c.pass).count();
        let summary = Summary { total: cases.len(), passed, failed: cases.len() - passed, skipped: skipped.len() };
        Report {
            schema: SCHEMA_VERSION.to_string(),
            suite: suite.to_string(),
            config,
            cases,
            skipped,
            summary,
            truncated: None,
            elapsed_ms: None,
        }
    }

    pub fn pass(&self) -> bool {
        self.summary.failed == 0 && self.truncated.is_none()
    }

    pub fn failures(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per case: key, pass, expected, actual.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("key,pass,expected,actual\n");
        for c in &self.cases {
            s.push_str(&format!(
                "{},{},{},{}\n",
                csv_field(&c.key),
                c.pass,
                csv_field(&c.expected.to_string()),
                csv_field(&c.actual.to_string())
            ));
        }
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = format!(
            "# {} ({}/{} passed, {} skipped)\n\n| key | pass | expected | actual |\n|---|---|---|---|\n",
            self.suite, self.summary.passed, self.summary.total, self.summary.skipped
        );
        for c in &self.cases {
            s.push_str(&format!("| {} | {} | `{}` | `{}` |\n", c.key, c.pass, c.expected, c.actual));
        }
        for k in &self.skipped {
            s.push_str(&format!("| {} | skipped | {} | |\n", k.key, k.reason));
        }
        s
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
