use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::Result;

/// `git describe` of the build, or `unknown` outside a checkout.
pub const BUILD: &str = env!("EELAB_GIT_DESCRIBE");

/// A CSV table; every row has one cell per header column.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Table {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        assert_eq!(
            row.len(),
            self.header.len(),
            "row width differs from the header of {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Space-aligned columns for the terminal.
impl fmt::Display for Table {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|k| {
                let cells = self.rows.iter().map(|r| r[k].chars().count());
                cells.chain([self.header[k].len()]).max().unwrap_or(0)
            })
            .collect();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let cells: Vec<String> = line
                .iter()
                .zip(&widths)
                .map(|(c, &w)| format!("{c:>w$}"))
                .collect();
            writeln!(f, "{}", cells.join("  "))?;
        }
        Ok(())
    }
}

/// Builds a row from displayable cells.
#[macro_export]
macro_rules! row {
    ($($cell:expr),* $(,)?) => { vec![$($cell.to_string()),*] };
}

/// An estimate with its standard error, tagged with the run that made it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub estimate: f64,
    pub se: f64,
    pub replicas: usize,
    pub digest: String,
    pub seed: u64,
}

impl ResultRow {
    pub const HEADER: [&'static str; 5] = ["estimate", "se", "replicas", "digest", "seed"];

    pub fn cells(&self) -> Vec<String> {
        row![
            self.estimate,
            self.se,
            self.replicas,
            self.digest,
            self.seed
        ]
    }

    /// `|estimate − target| ≤ k·se`.
    pub fn within(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.se
    }
}

/// One pass/fail threshold of an experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}: {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Everything an experiment produces.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: String,
    pub digest: String,
    pub seed: u64,
    pub tables: Vec<Table>,
    pub summary: Map<String, Value>,
    pub checks: Vec<Check>,
    /// One-line human summary.
    pub line: String,
}

impl Report {
    pub fn new(command: &str, digest: String, seed: u64) -> Self {
        Report {
            command: command.to_owned(),
            digest,
            seed,
            tables: Vec::new(),
            summary: Map::new(),
            checks: Vec::new(),
            line: String::new(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) {
        self.summary.insert(
            key.to_owned(),
            serde_json::to_value(value).expect("summary values serialize"),
        );
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, pass, detail));
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn table(&self, name: &str) -> Option<&Table> {
        self.tables.iter().find(|t| t.name == name)
    }

    pub fn json(&self) -> Value {
        let mut m = Map::new();
        m.insert("command".into(), self.command.clone().into());
        m.insert("digest".into(), self.digest.clone().into());
        m.insert("seed".into(), self.seed.into());
        m.insert("build".into(), BUILD.into());
        m.insert("summary".into(), Value::Object(self.summary.clone()));
        m.insert(
            "checks".into(),
            serde_json::to_value(&self.checks).expect("checks serialize"),
        );
        m.insert("passed".into(), self.passed().into());
        Value::Object(m)
    }

    /// Write the tables and the JSON summary. `out` is a directory, or a
    /// `.csv` path for the first table (the others and the JSON go beside it).
    pub fn write(&self, out: &Path) -> Result<Vec<PathBuf>> {
        let (dir, first) = if out.extension().is_some_and(|e| e == "csv") {
            (
                out.parent().map(Path::to_path_buf).unwrap_or_default(),
                Some(out.to_path_buf()),
            )
        } else {
            (out.to_path_buf(), None)
        };
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(&dir)?;
        }
        let stem = first.as_ref().and_then(|p| p.file_stem()).map_or_else(
            || self.command.clone(),
            |s| s.to_string_lossy().into_owned(),
        );
        let mut written = Vec::new();
        for (k, t) in self.tables.iter().enumerate() {
            let path = match (&first, k) {
                (Some(p), 0) => p.clone(),
                (Some(_), _) => dir.join(format!("{stem}-{}.csv", t.name)),
                (None, _) => dir.join(format!("{}.csv", t.name)),
            };
            t.write_csv(&path)?;
            written.push(path);
        }
        let json = dir.join(format!("{stem}.json"));
        fs::write(&json, serde_json::to_string_pretty(&self.json())? + "\n")?;
        written.push(json);
        Ok(written)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", "abc".into(), 7);
        let mut t = Table::new("demo", &["a", "b"]);
        t.push(row![1, 0.5]);
        r.tables.push(t);
        r.tables.push(Table::new("extra", &["x"]));
        r.set("value", 1.5);
        r.check("ok", true, "fine");
        r
    }

    #[test]
    fn writes_into_a_directory_or_beside_a_csv() {
        let dir = std::env::temp_dir().join(format!("eelab-report-{}", std::process::id()));
        let r = sample();
        let files = r.write(&dir).unwrap();
        assert_eq!(
            files,
            vec![
                dir.join("demo.csv"),
                dir.join("extra.csv"),
                dir.join("demo.json")
            ]
        );
        assert_eq!(
            fs::read_to_string(dir.join("demo.csv")).unwrap(),
            "a,b\n1,0.5\n"
        );
        let files = r.write(&dir.join("trace.csv")).unwrap();
        assert_eq!(files[1], dir.join("trace-extra.csv"));
        assert_eq!(files[2], dir.join("trace.json"));
        let json: Value = serde_json::from_str(&fs::read_to_string(&files[2]).unwrap()).unwrap();
        assert_eq!(json["summary"]["value"], 1.5);
        assert_eq!(json["passed"], true);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn failing_check_fails_the_report() {
        let mut r = sample();
        r.check("bad", false, "1 > 0");
        assert!(!r.passed());
        assert_eq!(r.checks[1].to_string(), "FAIL bad: 1 > 0");
    }

    #[test]
    fn tables_display_aligned() {
        let mut t = Table::new("t", &["a", "bb"]);
        t.push(row![10, 2]);
        assert_eq!(t.to_string(), " a  bb\n10   2\n");
    }

    #[test]
    fn result_rows() {
        let row = ResultRow {
            estimate: 1.0,
            se: 0.1,
            replicas: 10,
            digest: "d".into(),
            seed: 3,
        };
        assert!(row.within(1.25, 3.0));
        assert!(!row.within(1.5, 3.0));
        assert_eq!(row.cells(), vec!["1", "0.1", "10", "d", "3"]);
    }
}
