use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::config::Format;
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn from_columns<S: AsRef<str>>(columns: &[S], data: &[&[f64]]) -> Self {
        let n = data.first().map_or(0, |c| c.len());
        let mut t = Self::new(columns);
        for i in 0..n {
            t.push(data.iter().map(|c| c[i]).collect());
        }
        t
    }

    pub fn to_csv(&self, config_hash: &str) -> String {
        let mut s = format!("# puc {VERSION} config_sha256={config_hash}\n");
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self, config_hash: &str) -> String {
        let mut s = serde_json::to_string_pretty(&json!({
            "tool": "puc",
            "version": VERSION,
            "config_sha256": config_hash,
            "columns": self.columns,
            "rows": self.rows,
        }))
        .expect("table serializes");
        s.push('\n');
        s
    }
}

/// Output directory plus the provenance stamped on every file.
pub struct Sink {
    pub dir: PathBuf,
    pub config_hash: String,
    pub format: Format,
    pub written: Vec<PathBuf>,
}

impl Sink {
    pub fn new(dir: &Path, config_hash: String, format: Format) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            config_hash,
            format,
            written: Vec::new(),
        })
    }

    fn write(&mut self, name: &str, contents: &str) -> Result<(), CliError> {
        let path = self.dir.join(name);
        let mut f = fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        f.write_all(contents.as_bytes())
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.written.push(path);
        Ok(())
    }

    /// Writes `<stem>.csv` or `<stem>.json` depending on the format.
    pub fn table(&mut self, stem: &str, table: &Table) -> Result<(), CliError> {
        match self.format {
            Format::Csv => self.write(&format!("{stem}.csv"), &table.to_csv(&self.config_hash)),
            Format::Json => self.write(&format!("{stem}.json"), &table.to_json(&self.config_hash)),
        }
    }

    /// Writes `<stem>.json` wrapping `value` with the tool stamp.
    pub fn json<T: Serialize>(&mut self, stem: &str, value: &T) -> Result<(), CliError> {
        let doc = json!({
            "tool": "puc",
            "version": VERSION,
            "config_sha256": self.config_hash,
            "data": value,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("value serializes");
        s.push('\n');
        self.write(&format!("{stem}.json"), &s)
    }

    /// Writes `<stem>.jsonl`, one record per line.
    pub fn json_lines<T: Serialize>(&mut self, stem: &str, records: &[T]) -> Result<(), CliError> {
        let mut s = String::new();
        for r in records {
            s.push_str(&serde_json::to_string(r).expect("record serializes"));
            s.push('\n');
        }
        self.write(&format!("{stem}.jsonl"), &s)
    }
}

/// File-name tag for a capacitance, e.g. `30pF`.
pub fn pf_tag(c: f64) -> String {
    format!("{}pF", (c * 1e12 * 1e3).round() / 1e3)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_stamp_then_header() {
        let t = Table::from_columns(&["a", "b"], &[&[1.0, 2.5], &[3.0, -0.125]]);
        let s = t.to_csv("abc");
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], format!("# puc {VERSION} config_sha256=abc"));
        assert_eq!(lines[1], "a,b");
        assert_eq!(lines[2], "1,3");
        assert_eq!(lines[3], "2.5,-0.125");
    }

    #[test]
    fn tags() {
        assert_eq!(pf_tag(30e-12), "30pF");
        assert_eq!(pf_tag(0.0), "0pF");
        assert_eq!(pf_tag(12.5e-12), "12.5pF");
    }
}
