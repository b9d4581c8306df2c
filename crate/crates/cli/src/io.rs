//! CSV and text output, trace input.

use std::fs;
use std::path::{Path, PathBuf};

use superradiance::units::S_PER_PS;
use superradiance::TemporalTrace;

use crate::error::{CliError, Result};

/// Shortest round-trip representation; scientific outside `[1e-4, 1e15)`.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e15).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

pub struct Csv {
    path: PathBuf,
    inner: csv::Writer<fs::File>,
}

impl Csv {
    pub fn create(path: PathBuf, header: &[&str]) -> Result<Self> {
        let file = fs::File::create(&path).map_err(|e| CliError::io(&path, e))?;
        let mut w = Self {
            inner: csv::Writer::from_writer(file),
            path,
        };
        w.record(header.iter().map(|s| s.to_string()))?;
        Ok(w)
    }

    pub fn record<I: IntoIterator<Item = String>>(&mut self, fields: I) -> Result<()> {
        let fields: Vec<String> = fields.into_iter().collect();
        self.inner.write_record(&fields).map_err(|e| self.err(e))
    }

    pub fn numbers(&mut self, values: &[f64]) -> Result<()> {
        self.record(values.iter().map(|&v| fmt_f64(v)))
    }

    pub fn finish(mut self) -> Result<()> {
        self.inner.flush().map_err(|e| CliError::io(&self.path, e))
    }

    fn err(&self, e: csv::Error) -> CliError {
        CliError::io(&self.path, std::io::Error::other(e))
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Reads a `time_ps,intensity_arb` trace. A `# pressure_mbar=<v>` comment
/// line anywhere before the data attaches the pressure.
pub fn read_trace(path: &Path) -> Result<TemporalTrace> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |line: u64, msg: String| CliError::Input(format!("{name}:{line}: {msg}"));
    if text.trim().is_empty() {
        return Err(CliError::Input(format!("{name}: empty trace file")));
    }

    let mut pressure = None;
    for (i, line) in text.lines().enumerate() {
        let Some(comment) = line.trim().strip_prefix('#') else {
            continue;
        };
        if let Some((k, v)) = comment.split_once('=') {
            if k.trim() == "pressure_mbar" {
                let p: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| bad(i as u64 + 1, format!("bad pressure value `{}`", v.trim())))?;
                pressure = Some(p);
            }
        }
    }

    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header_line = reader.position().line();
    let headers = reader
        .headers()
        .map_err(|e| bad(header_line, e.to_string()))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    if cols != ["time_ps", "intensity_arb"] {
        return Err(CliError::Input(format!(
            "{name}: expected header `time_ps,intensity_arb`, found `{}`",
            cols.join(",")
        )));
    }

    let (mut t, mut y) = (Vec::new(), Vec::new());
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            bad(line, e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let num = |i: usize, what: &str| -> Result<f64> {
            let s = rec.get(i).unwrap_or("");
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(line, format!("{what} `{s}` is not a number")))
        };
        t.push(num(0, "time")? * S_PER_PS);
        y.push(num(1, "intensity")?);
    }
    if t.is_empty() {
        return Err(CliError::Input(format!("{name}: no data rows")));
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name.clone());
    TemporalTrace::new(t, y, pressure, label).map_err(|e| CliError::Input(format!("{name}: {e}")))
}
