//! Result files: one TOML document per run plus CSV side files.

use std::fs;
use std::path::{Path, PathBuf};

use covering::Result;
use toml::{Table, Value};

/// A CSV side file held in memory until the run is written out.
#[derive(Debug, Clone, Default)]
pub struct CsvFile {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvFile {
    pub fn new(name: &str, header: &[&str]) -> Self {
        CsvFile {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }
}

/// Everything one subcommand produces. Keys are kept sorted, so the written
/// document is byte-identical across replays.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub command: String,
    pub config: Table,
    pub result: Table,
    /// Asserted certificates; the run passes iff all hold.
    pub checks: Table,
    pub csv: Vec<CsvFile>,
    pub svg: Option<String>,
}

pub fn int(x: impl TryInto<i64>) -> Value {
    Value::Integer(x.try_into().unwrap_or(i64::MAX))
}

impl Report {
    pub fn new(command: &str) -> Self {
        Report {
            command: command.into(),
            ..Default::default()
        }
    }

    pub fn set(&mut self, key: &str, v: impl Into<Value>) {
        self.result.insert(key.into(), v.into());
    }

    pub fn check(&mut self, key: &str, ok: bool) {
        self.checks.insert(key.into(), Value::Boolean(ok));
    }

    pub fn pass(&self) -> bool {
        self.checks.values().all(|v| v.as_bool() == Some(true))
    }

    /// Structured text of the run, without side-file references.
    pub fn document(&self, files: &[String]) -> String {
        let mut doc = Table::new();
        doc.insert("command".into(), self.command.clone().into());
        doc.insert("pass".into(), self.pass().into());
        doc.insert("checks".into(), Value::Table(self.checks.clone()));
        doc.insert("config".into(), Value::Table(self.config.clone()));
        doc.insert("result".into(), Value::Table(self.result.clone()));
        doc.insert(
            "files".into(),
            Value::Array(files.iter().map(|f| Value::String(f.clone())).collect()),
        );
        toml::to_string(&doc).expect("plain tables always serialize")
    }

    /// Writes `<command>.toml`, the CSV side files (skipping any longer than
    /// `max_rows`) and the SVG if present. Returns the result file path.
    pub fn write(&mut self, dir: &Path, max_rows: usize) -> Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let mut files = Vec::new();
        let mut skipped = Vec::new();
        for f in &self.csv {
            if f.rows.len() > max_rows {
                skipped.push(Value::String(format!("{} ({} rows)", f.name, f.rows.len())));
                continue;
            }
            let name = format!("{}_{}.csv", self.command, f.name);
            let mut w = csv::Writer::from_path(dir.join(&name)).map_err(csv_err)?;
            w.write_record(&f.header).map_err(csv_err)?;
            for r in &f.rows {
                w.write_record(r).map_err(csv_err)?;
            }
            w.flush()?;
            files.push(name);
        }
        if !skipped.is_empty() {
            self.result
                .insert("skipped_csv".into(), Value::Array(skipped));
        }
        if let Some(svg) = &self.svg {
            let name = format!("{}.svg", self.command);
            fs::write(dir.join(&name), svg)?;
            files.push(name);
        }
        let path = dir.join(format!("{}.toml", self.command));
        fs::write(&path, self.document(&files))?;
        Ok(path)
    }
}

fn csv_err(e: csv::Error) -> covering::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => std::io::Error::other(format!("{other:?}")).into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_and_pass_follows_checks() {
        let mut r = Report::new("demo");
        r.set("zeta", 1.5);
        r.set("alpha", int(3u64));
        r.check("ok", true);
        let doc = r.document(&[]);
        assert!(doc.find("alpha").unwrap() < doc.find("zeta").unwrap());
        assert!(doc.contains("pass = true"));
        r.check("broken", false);
        assert!(!r.pass());
    }
}
