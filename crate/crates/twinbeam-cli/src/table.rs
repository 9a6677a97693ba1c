//! Column tables and their CSV / JSON renderings.
//!
//! CSV carries 17 significant digits so downstream diffs are exact; JSON
//! mirrors the same columns as arrays in declaration order. Cells that were
//! not computed (checked columns like the entanglement of formation) render
//! as empty CSV fields and JSON nulls.

use crate::config::OutputFormat;

pub struct Table {
    columns: Vec<(String, Vec<Option<f64>>)>,
    rows: usize,
}

impl Table {
    pub fn new() -> Self {
        Self {
            columns: Vec::new(),
            rows: 0,
        }
    }

    pub fn push(&mut self, name: &str, values: Vec<f64>) -> &mut Self {
        self.push_optional(name, values.into_iter().map(Some).collect())
    }

    pub fn push_optional(&mut self, name: &str, values: Vec<Option<f64>>) -> &mut Self {
        if self.columns.is_empty() {
            self.rows = values.len();
        } else {
            assert_eq!(values.len(), self.rows, "ragged column {name}");
        }
        self.columns.push((name.to_string(), values));
        self
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in 0..self.rows {
            let mut first = true;
            for (_, values) in &self.columns {
                if !first {
                    out.push(',');
                }
                first = false;
                if let Some(v) = values[row] {
                    out.push_str(&format_full(v));
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut out = String::from("{\n");
        for (i, (name, values)) in self.columns.iter().enumerate() {
            out.push_str(&format!("  {}: [", serde_json::to_string(name).unwrap()));
            for (j, v) in values.iter().enumerate() {
                if j > 0 {
                    out.push_str(", ");
                }
                match v {
                    Some(x) if x.is_finite() => {
                        out.push_str(&serde_json::to_string(x).unwrap())
                    }
                    // JSON has no infinities; fall back to strings there.
                    Some(x) => out.push_str(&serde_json::to_string(&x.to_string()).unwrap()),
                    None => out.push_str("null"),
                }
            }
            out.push(']');
            if i + 1 < self.columns.len() {
                out.push(',');
            }
            out.push('\n');
        }
        out.push_str("}\n");
        out
    }
}

/// Full double precision: 17 significant digits.
pub fn format_full(value: f64) -> String {
    format!("{value:.16e}")
}
