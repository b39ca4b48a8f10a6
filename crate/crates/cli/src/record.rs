//! Run records and their JSON/CSV renderings.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::args::Format;
use crate::error::{config, HarnessError, Result};

pub const SCHEMA: &str = "parafalc.run-record";
pub const SCHEMA_VERSION: u32 = 1;

/// Key holding wall-clock timings; the only non-reproducible part of a record.
pub const TIMINGS_KEY: &str = "timings_ms";

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub passed: bool,
    pub checks: u64,
    pub violations: u64,
    /// Descriptions of the first failures, in deterministic order.
    pub failures: Vec<String>,
}

/// A rectangular table for CSV output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub schema: &'static str,
    pub schema_version: u32,
    pub artifact_version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub result: Value,
    pub summary: Summary,
    pub timings_ms: BTreeMap<String, f64>,
    #[serde(skip)]
    pub table: Table,
}

impl RunRecord {
    pub fn new(command: &'static str, config: Value) -> Self {
        RunRecord {
            schema: SCHEMA,
            schema_version: SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            result: Value::Null,
            summary: Summary { passed: true, ..Summary::default() },
            timings_ms: BTreeMap::new(),
            table: Table::default(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn to_csv(&self) -> Result<String> {
        if self.table.header.is_empty() {
            return Err(config(format!("{} has no CSV form", self.command)));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.table.header)?;
        for row in &self.table.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| HarnessError::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(path) => write_file(path, &text),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|source| HarnessError::Io { path: "<stdout>".into(), source })
            }
        }
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

pub fn read_file(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.to_path_buf(), source })
}

/// Drops the timing key so two records can be compared byte for byte.
pub fn strip_timings(json: &str) -> Result<String> {
    let mut v: Value = serde_json::from_str(json)?;
    if let Some(obj) = v.as_object_mut() {
        obj.remove(TIMINGS_KEY);
    }
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

/// Wall-clock time per named phase.
pub struct Phases {
    start: Instant,
    times: BTreeMap<String, f64>,
}

impl Default for Phases {
    fn default() -> Self {
        Phases { start: Instant::now(), times: BTreeMap::new() }
    }
}

impl Phases {
    /// Closes the current phase under `name` and starts the next one.
    pub fn mark(&mut self, name: &str) {
        let now = Instant::now();
        *self.times.entry(name.to_string()).or_default() += (now - self.start).as_secs_f64() * 1e3;
        self.start = now;
    }

    pub fn finish(self) -> BTreeMap<String, f64> {
        self.times
    }
}

/// Counts for one named check.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub checked: u64,
    pub violations: u64,
}

/// Per-check tallies plus a capped list of failure descriptions.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Tallies {
    pub counts: BTreeMap<String, Tally>,
    #[serde(skip)]
    pub failures: Vec<String>,
}

pub const MAX_LISTED_FAILURES: usize = 50;

impl Tallies {
    pub fn record(&mut self, name: &str, ok: bool, context: impl FnOnce() -> String) {
        let t = self.counts.entry(name.to_string()).or_default();
        t.checked += 1;
        if !ok {
            t.violations += 1;
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(format!("{name}: {}", context()));
            }
        }
    }

    /// Adds `checked` checks of which `violations` failed.
    pub fn record_many(&mut self, name: &str, checked: u64, violations: u64, context: impl FnOnce() -> String) {
        let t = self.counts.entry(name.to_string()).or_default();
        t.checked += checked;
        t.violations += violations;
        if violations > 0 && self.failures.len() < MAX_LISTED_FAILURES {
            self.failures.push(format!("{name}: {}", context()));
        }
    }

    pub fn merge(&mut self, other: &Tallies) {
        for (k, t) in &other.counts {
            let e = self.counts.entry(k.clone()).or_default();
            e.checked += t.checked;
            e.violations += t.violations;
        }
        for f in &other.failures {
            if self.failures.len() < MAX_LISTED_FAILURES {
                self.failures.push(f.clone());
            }
        }
    }

    pub fn checks(&self) -> u64 {
        self.counts.values().map(|t| t.checked).sum()
    }

    pub fn violations(&self) -> u64 {
        self.counts.values().map(|t| t.violations).sum()
    }

    pub fn summary(&self) -> Summary {
        Summary {
            passed: self.violations() == 0,
            checks: self.checks(),
            violations: self.violations(),
            failures: self.failures.clone(),
        }
    }
}
