//! CSV output with a reproducibility header.
//!
//! A file starts with `#` lines: tool and version, the table kind, the
//! master seed, run notes and the full configuration as TOML. Then comes the
//! column row and the data. Lines end in LF and floats carry 17 significant
//! digits, so identical configs give identical bytes.

use std::fmt::Write as _;

use qaud::annealer::io::fmt_f64;

use crate::config::ExperimentConfig;

pub const TOOL: &str = concat!("qaud-experiments ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub kind: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Extra `key=value` header entries, e.g. calibrated antenna counts.
    pub notes: Vec<(String, String)>,
}

impl Table {
    pub fn new(kind: &'static str, columns: &[&'static str]) -> Self {
        Self {
            kind,
            columns: columns.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch in {}", self.kind);
        self.rows.push(row);
    }

    pub fn note(&mut self, key: impl Into<String>, value: impl ToString) {
        self.notes.push((key.into(), value.to_string()));
    }

    /// Column header and rows only.
    pub fn body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self, cfg: &ExperimentConfig) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# tool={TOOL}");
        let _ = writeln!(out, "# kind={}", self.kind);
        let _ = writeln!(out, "# master_seed={}", cfg.master_seed);
        let _ = writeln!(out, "# ci=wald95");
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}={v}");
        }
        for line in cfg.to_toml().lines() {
            let _ = writeln!(out, "# config: {line}");
        }
        out.push_str(&self.body());
        out
    }
}

pub fn num(x: f64) -> String {
    fmt_f64(x)
}

/// Splits a rendered table into its `# key=value` notes and its body lines.
pub fn parse_rendered(text: &str) -> (Vec<(String, String)>, Vec<Vec<String>>) {
    let mut notes = Vec::new();
    let mut rows = Vec::new();
    for line in text.lines() {
        if let Some(meta) = line.strip_prefix("# ") {
            if let Some((k, v)) = meta.split_once('=') {
                if !k.contains(' ') {
                    notes.push((k.to_string(), v.to_string()));
                }
            }
        } else if !line.is_empty() {
            rows.push(line.split(',').map(str::to_string).collect());
        }
    }
    (notes, rows)
}
