use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Format;

/// A CSV table kept as strings so that rows of mixed types stay exact.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Stringify a heterogeneous row.
#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::output::cell(&$x)),*] };
}

/// Table cell; floats far from unity switch to exponent notation. Both
/// forms round-trip exactly.
pub trait Cell {
    fn cell(&self) -> String;
}

impl Cell for f64 {
    fn cell(&self) -> String {
        let a = self.abs();
        if a == 0.0 || !a.is_finite() || (1e-3..1e6).contains(&a) {
            self.to_string()
        } else {
            format!("{self:e}")
        }
    }
}

macro_rules! display_cell {
    ($($t:ty),*) => { $(impl Cell for $t { fn cell(&self) -> String { self.to_string() } })* };
}
display_cell!(u32, u64, usize, bool, String, &str);

pub fn cell<T: Cell>(x: &T) -> String {
    x.cell()
}

/// What a command produced, before rendering.
#[derive(Debug, Clone)]
pub struct Outcome {
    /// Full result.
    pub result: Value,
    /// Short result for the CSV header; defaults to the full result.
    pub summary: Option<Value>,
    pub table: Option<Table>,
    pub failures: Vec<String>,
    pub artifacts: Vec<PathBuf>,
    pub default_format: Format,
}

impl Outcome {
    pub fn new(result: impl Serialize, default_format: Format) -> Self {
        Outcome {
            result: serde_json::to_value(result).expect("results serialize"),
            summary: None,
            table: None,
            failures: vec![],
            artifacts: vec![],
            default_format,
        }
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_summary(mut self, summary: impl Serialize) -> Self {
        self.summary = Some(serde_json::to_value(summary).expect("results serialize"));
        self
    }

    pub fn check(&mut self, ok: bool, message: impl Into<String>) {
        if !ok {
            self.failures.push(message.into());
        }
    }

    pub fn document(&self, config: &Value) -> Value {
        json!({
            "config": config,
            "result": self.result,
            "checks": { "passed": self.failures.is_empty(), "failures": self.failures },
        })
    }

    /// CSV with the config and the summary as leading comment lines.
    pub fn csv(&self, config: &Value) -> String {
        let summary = self.summary.as_ref().unwrap_or(&self.result);
        let mut s = format!("# config: {config}\n# summary: {summary}\n");
        if !self.failures.is_empty() {
            s += &format!("# failures: {}\n", json!(self.failures));
        }
        if let Some(t) = &self.table {
            let mut w = csv::Writer::from_writer(vec![]);
            w.write_record(&t.header).expect("in-memory write");
            for r in &t.rows {
                w.write_record(r).expect("in-memory write");
            }
            s += &String::from_utf8(w.into_inner().expect("in-memory write")).expect("utf-8 cells");
        }
        s
    }

    pub fn render(&self, format: Format, config: &Value) -> String {
        match format {
            Format::Json => {
                serde_json::to_string_pretty(&self.document(config)).expect("results serialize")
                    + "\n"
            }
            Format::Csv => self.csv(config),
        }
    }

    /// `<command>.json` always, `<command>.csv` when there is a table.
    pub fn write_artifacts(
        &self,
        dir: &Path,
        command: &str,
        config: &Value,
    ) -> std::io::Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let json_path = dir.join(format!("{command}.json"));
        fs::write(&json_path, self.render(Format::Json, config))?;
        let mut paths = vec![json_path];
        if self.table.is_some() {
            let csv_path = dir.join(format!("{command}.csv"));
            fs::write(&csv_path, self.csv(config))?;
            paths.push(csv_path);
        }
        Ok(paths)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ManifestEntry<'a> {
    pub command: &'a str,
    pub config: &'a Value,
    pub artifacts: Vec<String>,
    pub wall_time_s: f64,
    pub exit_code: i32,
    pub version: &'static str,
    pub finished_unix_s: u64,
}

/// Append one JSON line to `<dir>/manifest.jsonl`.
pub fn append_manifest(
    dir: &Path,
    mut entry: ManifestEntry<'_>,
    artifacts: &[PathBuf],
) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    entry.artifacts = artifacts.iter().map(|p| p.display().to_string()).collect();
    entry.finished_unix_s = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join("manifest.jsonl"))?;
    writeln!(
        f,
        "{}",
        serde_json::to_string(&entry).expect("manifest serializes")
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_embeds_config() {
        let mut t = Table::new(&["h", "k"]);
        t.push(row![0.5, 3u32]);
        t.push(row![1.5e-7, true]);
        let o = Outcome::new(json!({"fit": 1.5}), Format::Csv).with_table(t);
        let s = o.csv(&json!({"seed": 7}));
        assert_eq!(
            s,
            "# config: {\"seed\":7}\n# summary: {\"fit\":1.5}\nh,k\n0.5,3\n1.5e-7,true\n"
        );
    }

    #[test]
    fn failures_flip_the_check() {
        let mut o = Outcome::new(json!({}), Format::Json);
        o.check(true, "fine");
        assert!(o.failures.is_empty());
        o.check(false, "broken");
        assert_eq!(o.document(&json!({}))["checks"]["passed"], json!(false));
    }
}
