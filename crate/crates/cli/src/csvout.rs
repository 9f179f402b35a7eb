//! CSV artifact construction and the run summary.
//!
//! Everything a run produces is accumulated in memory and flushed to the
//! output directory in one pass at the end, so a failed run never leaves
//! a half-written artifact set behind. All files use LF line endings,
//! `.` as the decimal separator, and 17 significant digits for floats,
//! which round-trips `f64` exactly — two runs with the same config and
//! seed produce byte-identical data files.

use std::path::{Path, PathBuf};

/// Scientific form with 17 significant digits (1 before the point, 16
/// after); parses back to the identical bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Wraps a field in double quotes, doubling any embedded quotes — used
/// for the JSON parameter column, which contains commas.
pub fn quote_csv(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

/// A one-line JSON object with keys in insertion order, so the same
/// parameters always serialize to the same bytes.
#[derive(Debug, Clone, Default)]
pub struct ParamJson {
    parts: Vec<String>,
}

impl ParamJson {
    pub fn new() -> Self {
        ParamJson::default()
    }

    pub fn f(mut self, key: &str, value: f64) -> Self {
        // Shortest round-trip form; JSON has no Infinity/NaN literals, so
        // quote the IEEE specials instead of emitting invalid syntax.
        let rendered = if value.is_finite() {
            format!("{value}")
        } else {
            format!("\"{value}\"")
        };
        self.parts.push(format!("\"{key}\":{rendered}"));
        self
    }

    pub fn u(mut self, key: &str, value: u64) -> Self {
        self.parts.push(format!("\"{key}\":{value}"));
        self
    }

    pub fn s(mut self, key: &str, value: &str) -> Self {
        let escaped = value.replace('\\', "\\\\").replace('"', "\\\"");
        self.parts.push(format!("\"{key}\":\"{escaped}\""));
        self
    }

    pub fn build(&self) -> String {
        format!("{{{}}}", self.parts.join(","))
    }
}

/// One CSV file under construction: a pinned header line plus rows.
#[derive(Debug, Clone)]
pub struct Csv {
    text: String,
    columns: usize,
}

impl Csv {
    pub fn new(header: &str) -> Csv {
        Csv {
            text: format!("{header}\n"),
            columns: header.split(',').count(),
        }
    }

    /// Appends one row; fields are written verbatim, so quote anything
    /// that may contain commas first. Panics on a column-count mismatch —
    /// that is a bug in the emitting subcommand, not a runtime condition.
    pub fn row(&mut self, fields: &[String]) {
        assert_eq!(
            fields.len(),
            self.columns,
            "row width {} against a {}-column header",
            fields.len(),
            self.columns
        );
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// The in-memory artifact set: relative file names and their contents,
/// in emission order.
#[derive(Debug, Default)]
pub struct ArtifactSet {
    files: Vec<(String, String)>,
}

impl ArtifactSet {
    pub fn new() -> Self {
        ArtifactSet::default()
    }

    pub fn add(&mut self, name: &str, contents: String) {
        self.files.push((name.to_string(), contents));
    }

    pub fn add_csv(&mut self, name: &str, csv: Csv) {
        self.add(name, csv.finish());
    }

    /// Emission-order file names; the binary itself reports paths from
    /// `write_all`, so this accessor only serves assertions.
    #[cfg(test)]
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.files.iter().map(|(name, _)| name.as_str())
    }

    /// Writes every file under `dir`, creating it if needed; returns the
    /// paths written.
    pub fn write_all(&self, dir: &Path) -> std::io::Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::with_capacity(self.files.len());
        for (name, contents) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, contents)?;
            written.push(path);
        }
        Ok(written)
    }
}

/// One contracted check of a run: its name, the parameters it ran under
/// (as one-line JSON), the worst ratio it observed, and the verdict.
#[derive(Debug, Clone)]
pub struct CheckRow {
    pub check: String,
    pub params: String,
    pub max_ratio: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn new(check: &str, params: &ParamJson, max_ratio: f64, pass: bool) -> Self {
        CheckRow {
            check: check.to_string(),
            params: params.build(),
            max_ratio,
            pass,
        }
    }
}

/// The machine-readable run summary backing `summary.csv`.
#[derive(Debug)]
pub struct RunSummary {
    pub subcommand: String,
    pub checks: Vec<CheckRow>,
    pub wall_ms: u128,
}

impl RunSummary {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Renders `summary.csv`. Every column but `wall_ms` is a pure
    /// function of config and seed; `wall_ms` is the one measured,
    /// nondeterministic field.
    pub fn to_csv(&self) -> String {
        let mut csv = Csv::new("subcommand,check,params,max_ratio,pass,wall_ms");
        for row in &self.checks {
            csv.row(&[
                self.subcommand.clone(),
                row.check.clone(),
                quote_csv(&row.params),
                fmt_f64(row.max_ratio),
                row.pass.to_string(),
                self.wall_ms.to_string(),
            ]);
        }
        csv.finish()
    }
}
