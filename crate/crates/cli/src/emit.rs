//! Emitted table documents.
//!
//! JSON schema:
//! `{version, convention_tag, query, trunc_certificate, [notes], exponent_names,
//!   [windows], rows: [{exponents: [...], value: "num/den"}]}`.
//! CSV: header row = exponent names + `value`, newline-terminated. Both
//! formats carry identical rational values; emission is deterministic, so
//! emit → parse → emit is byte-identical.

use k3series::window::ENTIRE;
use k3series::{TruncationSpec, CONVENTION_TAG, FORMAT_VERSION};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub version: u32,
    pub convention_tag: String,
    pub query: String,
    pub trunc_certificate: TruncationSpec,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub notes: Option<String>,
    pub exponent_names: Vec<String>,
    /// per-q-slice exactness windows (`exact_high` absent = known at every
    /// exponent); only populated for p-carrying tables
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub windows: Vec<WindowRow>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowRow {
    pub q: i64,
    pub exact_low: i64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact_high: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub exponents: Vec<i64>,
    pub value: String,
}

impl TableDoc {
    pub fn new(query: impl Into<String>, cert: TruncationSpec, names: &[&str]) -> TableDoc {
        TableDoc {
            version: FORMAT_VERSION,
            convention_tag: CONVENTION_TAG.to_string(),
            query: query.into(),
            trunc_certificate: cert,
            notes: None,
            exponent_names: names.iter().map(|s| s.to_string()).collect(),
            windows: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, exponents: Vec<i64>, value: &k3series::Rational) {
        self.rows.push(Row {
            exponents,
            value: k3series::rational::rational_to_string(value),
        });
    }

    pub fn push_window(&mut self, q: i64, low: i64, high: i64) {
        self.windows.push(WindowRow {
            q,
            exact_low: low,
            exact_high: (high < ENTIRE).then_some(high),
        });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for name in &self.exponent_names {
            out.push_str(name);
            out.push(',');
        }
        out.push_str("value\n");
        for row in &self.rows {
            for e in &row.exponents {
                out.push_str(&e.to_string());
                out.push(',');
            }
            out.push_str(&row.value);
            out.push('\n');
        }
        out
    }

    /// Parse rows back out of the CSV emission (for round-trip checks).
    pub fn csv_rows(text: &str) -> Vec<Row> {
        text.lines()
            .skip(1)
            .map(|line| {
                let mut parts: Vec<&str> = line.split(',').collect();
                let value = parts.pop().unwrap_or("").to_string();
                Row {
                    exponents: parts.iter().map(|p| p.parse().unwrap()).collect(),
                    value,
                }
            })
            .collect()
    }
}
