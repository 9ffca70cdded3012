//! Report envelope and output files.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

/// A CSV table written next to the JSON report.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub pass: bool,
    pub body: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str, pass: bool, body: Value) -> Self {
        Report {
            command: command.into(),
            pass,
            body,
            tables: Vec::new(),
        }
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.tables.push(t);
        self
    }

    pub fn envelope(&self, mode: &str, seed: u64) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command,
            "mode": mode,
            "seed": seed,
            "pass": self.pass,
            "report": self.body,
        })
    }

    /// Prints the envelope and, with `out`, writes `<command>.json` and one
    /// CSV per table into that directory.
    pub fn emit(&self, mode: &str, seed: u64, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
        let text = serde_json::to_string_pretty(&self.envelope(mode, seed)).expect("reports serialize");
        writeln!(stdout, "{text}").map_err(|e| CliError::Io("stdout".into(), e))?;
        let Some(dir) = out else { return Ok(()) };
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io(dir.display().to_string(), e))?;
        let file = dir.join(format!("{}.json", self.command.replace(' ', "-")));
        std::fs::write(&file, text + "\n").map_err(|e| CliError::Io(file.display().to_string(), e))?;
        for t in &self.tables {
            let path = dir.join(format!("{}.csv", t.name));
            let io = |e: csv::Error| CliError::Input(format!("{}: {e}", path.display()));
            let mut w = csv::Writer::from_path(&path).map_err(io)?;
            w.write_record(&t.header).map_err(io)?;
            for r in &t.rows {
                w.write_record(r).map_err(io)?;
            }
            w.flush().map_err(|e| CliError::Io(path.display().to_string(), e))?;
        }
        Ok(())
    }
}

/// Shortest round-trip text of a float.
pub fn num(v: f64) -> String {
    format!("{v}")
}

/// JSON number, or `null` when not finite.
pub fn jnum(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}
