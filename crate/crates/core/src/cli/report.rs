use serde_json::{json, Value};

use super::config::OutputFormat;
use crate::error::Error;
use crate::spectrum::Spectrum;

/// Decimal with 17 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{:.16e}", unsign_zero(x))
}

/// Maps `-0.0` to `0.0` so roots at the origin print without a sign.
pub fn unsign_zero(x: f64) -> f64 {
    x + 0.0
}

/// Tabular view of a report, used for CSV and text output.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    fn text(&self) -> String {
        let cols = self.header.len();
        let mut width = vec![0; cols];
        for r in std::iter::once(&self.header).chain(&self.rows) {
            for (w, cell) in width.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let line = |r: &Vec<String>| {
            r.iter()
                .zip(&width)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = line(&self.header);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&line(r));
            out.push('\n');
        }
        out
    }
}

/// Result of one command.
#[derive(Clone, Debug)]
pub struct Report {
    pub json: Value,
    pub table: Table,
    /// Lines printed above the table in text mode.
    pub notes: Vec<String>,
    /// False when `verify` found a failing invariant.
    pub success: bool,
}

impl Report {
    pub fn new(json: Value, table: Table) -> Self {
        Report {
            json,
            table,
            notes: Vec::new(),
            success: true,
        }
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("serializable");
                s.push('\n');
                s
            }
            OutputFormat::Csv => self.table.csv(),
            OutputFormat::Text => {
                let mut s: String = self.notes.iter().map(|n| format!("{n}\n")).collect();
                s.push_str(&self.table.text());
                s
            }
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.success {
            0
        } else {
            1
        }
    }
}

pub fn spectrum_json(sp: &Spectrum) -> Value {
    Value::Array(
        sp.eigenvalues
            .iter()
            .map(|e| {
                json!({
                    "re": unsign_zero(e.value.re),
                    "im": unsign_zero(e.value.im),
                    "multiplicity": e.multiplicity,
                    "residual": e.residual,
                })
            })
            .collect(),
    )
}

pub fn spectrum_table(sp: &Spectrum) -> Table {
    let mut t = Table::new(&["re", "im", "multiplicity", "residual"]);
    for e in &sp.eigenvalues {
        t.push(vec![
            fmt_num(e.value.re),
            fmt_num(e.value.im),
            e.multiplicity.to_string(),
            fmt_num(e.residual),
        ]);
    }
    t
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::NotInScale(_) => "not_in_scale",
        Error::InvalidTimeScale(_) => "invalid_time_scale",
        Error::InvalidProblem(_) => "invalid_problem",
        Error::NoRoots => "no_roots",
        Error::RootsNotConverged { .. } => "roots_not_converged",
        Error::QrNotConverged { .. } => "qr_not_converged",
        Error::Degenerate => "degenerate",
        Error::MatrixForm(_) => "matrix_form",
        Error::Integration(_) => "integration",
        Error::Contour(_) => "contour",
        Error::Config { .. } => "config",
    }
}

/// Structured error document.
pub fn error_json(e: &Error) -> Value {
    let mut body = json!({"kind": error_kind(e), "message": e.to_string()});
    match e {
        Error::Config { path, .. } => {
            body["path"] = json!(path);
        }
        Error::RootsNotConverged { partial, .. } | Error::QrNotConverged { partial } => {
            body["partial"] = Value::Array(
                partial.iter().map(|z| json!({"re": z.re, "im": z.im})).collect(),
            );
        }
        _ => {}
    }
    json!({ "error": body })
}
