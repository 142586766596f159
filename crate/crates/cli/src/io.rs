//! Series files, CSV tables and the JSON sidecar.

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cma_kernel::estimation::SampledSeries;

use crate::error::CliError;

/// 17 significant digits, so CSV payloads round-trip and are byte-stable.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Sidecar {
    pub delta: f64,
    pub n: usize,
    /// `csv` or `f64le`.
    pub format: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<serde_json::Value>,
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

fn is_binary(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "bin")
}

fn io_err(path: &Path, e: io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Header row plus one line per row.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn write_to<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "{}", self.header.join(","))?;
        for r in &self.rows {
            writeln!(w, "{}", r.join(","))?;
        }
        w.flush()
    }

    /// To `path`, or stdout.
    pub fn emit(&self, path: Option<&Path>) -> Result<(), CliError> {
        match path {
            Some(p) => {
                let f = fs::File::create(p).map_err(|e| io_err(p, e))?;
                self.write_to(&mut BufWriter::new(f)).map_err(|e| io_err(p, e))
            }
            None => match self.write_to(&mut io::stdout().lock()) {
                // reader went away (`| head`), nothing left to report
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|e| CliError::Io(format!("stdout: {e}"))),
            },
        }
    }
}

pub fn write_json(path: &Path, v: &impl Serialize) -> Result<(), CliError> {
    let s = serde_json::to_string_pretty(v).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(path, s + "\n").map_err(|e| io_err(path, e))
}

pub fn write_series(path: &Path, series: &SampledSeries, mut meta: Sidecar) -> Result<(), CliError> {
    let f = fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(f);
    let res = if is_binary(path) {
        meta.format = "f64le".into();
        series.values.iter().try_for_each(|v| w.write_all(&v.to_le_bytes()))
    } else {
        meta.format = "csv".into();
        writeln!(w, "t,value").and_then(|_| {
            series
                .values
                .iter()
                .enumerate()
                .try_for_each(|(i, v)| writeln!(w, "{},{}", fmt(i as f64 * series.delta), fmt(*v)))
        })
    };
    res.and_then(|_| w.flush()).map_err(|e| io_err(path, e))?;
    write_json(&sidecar_path(path), &meta)
}

/// Reads a series. The spacing comes from `delta`, else the sidecar, else the
/// first two entries of a `t` column.
pub fn read_series(path: &Path, delta: Option<f64>) -> Result<SampledSeries, CliError> {
    let side = sidecar_path(path);
    let meta: Option<Sidecar> = match fs::read_to_string(&side) {
        Ok(s) => Some(serde_json::from_str(&s).map_err(|e| CliError::Config(format!("{}: {e}", side.display())))?),
        Err(_) => None,
    };
    let (values, t_delta) = if is_binary(path) {
        let bytes = fs::read(path).map_err(|e| io_err(path, e))?;
        if bytes.len() % 8 != 0 {
            return Err(CliError::Input(format!(
                "{}: length {} is not a multiple of 8",
                path.display(),
                bytes.len()
            )));
        }
        let v = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect();
        (v, None)
    } else {
        read_csv_values(path)?
    };
    let delta = delta
        .or(meta.map(|m| m.delta))
        .or(t_delta)
        .ok_or_else(|| CliError::Input(format!("{}: sampling interval unknown; pass --delta", path.display())))?;
    Ok(SampledSeries::new(delta, values)?)
}

fn read_csv_values(path: &Path) -> Result<(Vec<f64>, Option<f64>), CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty()).peekable();
    let first = lines.peek().copied().unwrap_or("");
    let has_header = first.split(',').any(|f| f.trim().parse::<f64>().is_err());
    let time_col = has_header && first.split(',').next().is_some_and(|f| f.trim() == "t");
    if has_header {
        lines.next();
    }
    let mut values = Vec::new();
    let mut times = Vec::new();
    for (i, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("{}: row {}: cannot parse {s:?}", path.display(), i + 1)))
        };
        values.push(parse(fields[fields.len() - 1])?);
        if time_col && times.len() < 2 {
            times.push(parse(fields[0])?);
        }
    }
    let t_delta = (times.len() == 2).then(|| times[1] - times[0]);
    Ok((values, t_delta))
}
