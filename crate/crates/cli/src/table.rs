use serde::Serialize;
use serde_json::Value;

use mp2_core::report::{csv_field, Report, SCHEMA_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

#[derive(Debug, Clone, Serialize)]
pub struct Table {
    pub schema: String,
    pub table: String,
    pub config: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(kind: &str, config: Value, columns: &[&str]) -> Self {
        Table {
            schema: SCHEMA_VERSION.into(),
            table: kind.into(),
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, f: Format) -> String {
        match f {
            Format::Json => serde_json::to_string_pretty(self).expect("table serializes") + "\n",
            Format::Csv => {
                let mut s = self.columns.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",") + "\n";
                for r in &self.rows {
                    s += &(r.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",") + "\n");
                }
                s
            }
            Format::Md => {
                let mut s = format!("| {} |\n|{}\n", self.columns.join(" | "), "---|".repeat(self.columns.len()));
                for r in &self.rows {
                    s += &format!("| {} |\n", r.join(" | "));
                }
                s
            }
        }
    }
}

pub fn render_report(r: &Report, f: Format) -> String {
    match f {
        Format::Json => r.to_json() + "\n",
        Format::Csv => r.to_csv(),
        Format::Md => r.to_markdown(),
    }
}
