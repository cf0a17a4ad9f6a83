//! CSV and JSON emission. Every file gets a `<path>.meta.json` sidecar with the
//! full config, the code version and the RNG name.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed-width float formatting that does not depend on locale.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.10e}")
    }
}

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

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        w.write_record(&self.header).map_err(io_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(io_err)?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }
}

fn io_err(e: impl ToString) -> CliError {
    CliError::Io(e.to_string())
}

pub fn meta(command: &str, config: Value, extra: Value) -> Value {
    json!({
        "command": command,
        "version": VERSION,
        "rng": plaquette_core::rng::RNG_NAME,
        "config": config,
        "extra": extra,
    })
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Writes `bytes` to `path`, or to stdout when `path` is empty.
pub fn write_bytes(path: &str, bytes: &[u8]) -> Result<(), CliError> {
    if path.is_empty() {
        io::stdout().write_all(bytes).map_err(io_err)
    } else {
        File::create(path).and_then(|mut f| f.write_all(bytes)).map_err(io_err)
    }
}

/// Writes a table and, for file output, its metadata sidecar.
pub fn emit_table(path: &str, table: &Table, meta: &Value) -> Result<(), CliError> {
    write_bytes(path, &table.to_csv()?)?;
    if !path.is_empty() {
        write_json(&sidecar(Path::new(path)), meta)?;
    }
    Ok(())
}

pub fn write_json(path: &Path, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(io_err)?;
    text.push('\n');
    File::create(path).and_then(|mut f| f.write_all(text.as_bytes())).map_err(io_err)
}

/// A small matplotlib script that plots `y` against `x` from the CSV.
pub fn emit_plot_script(csv_path: &str, x: &str, ys: &[&str]) -> Result<PathBuf, CliError> {
    if csv_path.is_empty() {
        return Err(CliError::Usage("--emit-plot-script needs --out".into()));
    }
    let script = Path::new(csv_path).with_extension("plot.py");
    let name = Path::new(csv_path).file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let mut s = String::new();
    s.push_str("import csv\nimport sys\nfrom pathlib import Path\n\nimport matplotlib.pyplot as plt\n\n");
    s.push_str(&format!("path = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).with_name({name:?})\n"));
    s.push_str("rows = list(csv.DictReader(path.open()))\n");
    s.push_str(&format!("xs = [float(r[{x:?}]) for r in rows]\n"));
    s.push_str("fig, ax = plt.subplots()\n");
    for y in ys {
        s.push_str(&format!("ax.plot(xs, [float(r[{y:?}]) for r in rows], marker='o', label={y:?})\n"));
    }
    s.push_str(&format!("ax.set_xlabel({x:?})\nax.legend()\nfig.savefig(path.with_suffix('.png'), dpi=150)\n"));
    File::create(&script).and_then(|mut f| f.write_all(s.as_bytes())).map_err(io_err)?;
    Ok(script)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_and_crlf() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec!["1".into(), fmt_f64(0.5)]);
        let s = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(s, "a,b\r\n1,5.0000000000e-1\r\n");
    }

    #[test]
    fn sidecar_appends_suffix() {
        assert_eq!(sidecar(Path::new("out/x.csv")), PathBuf::from("out/x.csv.meta.json"));
    }
}
