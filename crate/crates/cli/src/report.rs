//! Report emission: JSON to stdout (and optionally a file), CSV rows and
//! plot-ready series.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] spreadlab_core::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Usage(String),
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io_error(path))?;
    }
    std::fs::write(path, text).map_err(io_error(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path).map_err(io_error(path))?;
    spreadlab_core::io::from_json(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, doc: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    write_text(path, &text)
}

/// Writes a line to stdout; a closed pipe ends output quietly.
pub fn print_text(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io {
            path: "<stdout>".into(),
            source: e,
        }),
        _ => Ok(()),
    }
}

/// Prints `value` and mirrors it to `--json-out`.
pub fn emit(value: &Value, json_out: Option<&Path>) -> CliResult<()> {
    print_text(&serde_json::to_string_pretty(value)?)?;
    if let Some(path) = json_out {
        write_json(path, value)?;
    }
    Ok(())
}

/// A table with a fixed column order.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| usage(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn write_csv(&self, path: &Path) -> CliResult<()> {
        write_text(path, &self.to_csv()?)
    }
}

/// `(series, x, y)` points for ratio-vs-scale and bound-vs-measured plots.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PlotData {
    pub points: Vec<(String, f64, f64)>,
}

impl PlotData {
    pub fn table(&self) -> Table {
        let mut t = Table::new(&["series", "x", "y"]);
        for (s, x, y) in &self.points {
            t.rows.push(vec![s.clone(), num(*x), num(*y)]);
        }
        t
    }
}

/// Shortest round-trip decimal form.
pub fn num(x: f64) -> String {
    format!("{x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_table_keeps_header() {
        let t = Table::new(&["n", "tra", "di", "gap"]);
        assert_eq!(t.to_csv().unwrap(), "n,tra,di,gap\n");
    }

    #[test]
    fn rows_follow_header_order() {
        let mut t = Table::new(&["a", "b"]);
        t.rows.push(vec!["1".into(), "x,y".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n1,\"x,y\"\n");
    }
}
