//! CSV emission with embedded run metadata.
//!
//! Every file starts with `#`-prefixed metadata lines (tool version,
//! command, and the fully-resolved configuration snapshot), followed by
//! an RFC-4180-style body: a header record and comma-separated rows,
//! with fields quoted when they contain commas, quotes, or newlines.
//! Nothing time- or machine-dependent is ever written, so identical
//! config + binary version produces byte-identical files.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::Result;

/// Quote a field per RFC 4180 when needed.
fn quote(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') || field.contains('\r')
    {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Deterministic float formatting for data cells: the shortest
/// round-trippable representation, written in exponent form outside
/// [1e−3, 1e6) so nanosecond- and gigahertz-scale values stay readable.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        return "nan".to_string();
    }
    let a = v.abs();
    if v.is_finite() && a != 0.0 && !(1e-3..1e6).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// Fixed-precision formatting for fidelity-like quantities.
pub fn fid(v: f64) -> String {
    format!("{v:.7}")
}

/// An in-memory CSV document: metadata, header, rows.
#[derive(Clone, Debug, Default)]
pub struct CsvDoc {
    metadata: Vec<String>,
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl CsvDoc {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add one `# key = value`-style metadata line (without the `#`).
    pub fn meta(&mut self, line: impl Into<String>) -> &mut Self {
        self.metadata.push(line.into());
        self
    }

    /// Embed a multi-line block (e.g. the resolved config) as metadata.
    pub fn meta_block(&mut self, block: &str) -> &mut Self {
        for line in block.lines() {
            self.metadata.push(line.to_string());
        }
        self
    }

    pub fn header(&mut self, columns: &[&str]) -> &mut Self {
        self.header = columns.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<String>) -> &mut Self {
        debug_assert_eq!(cells.len(), self.header.len(), "row width != header width");
        self.rows.push(cells);
        self
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    /// Render the document.
    pub fn to_string(&self) -> String {
        let mut out = String::new();
        for m in &self.metadata {
            let _ = writeln!(out, "# {m}");
        }
        let _ = writeln!(
            out,
            "{}",
            self.header.iter().map(|h| quote(h)).collect::<Vec<_>>().join(",")
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}",
                r.iter().map(|c| quote(c)).collect::<Vec<_>>().join(",")
            );
        }
        out
    }

    /// Write the document to a file.
    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string())?;
        Ok(())
    }
}
