use std::path::{Path, PathBuf};

use serde::Serialize;

use super::run::RunReport;
use crate::error::{Error, Result};
use crate::trace::FidelityTrace;

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV text: header row, then one row per sample with floats in
/// 17-significant-digit scientific notation.
pub fn trace_csv(trace: &FidelityTrace) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        message: e.to_string(),
    };
    w.write_record(trace.header()).map_err(err)?;
    for r in &trace.rows {
        let mut rec = vec![num(r.t_us), num(r.t_over_tau), num(r.fidelity)];
        rec.extend(r.populations.iter().map(|&p| num(p)));
        if let Some(n) = r.photon_mean {
            rec.push(num(n));
        }
        w.write_record(&rec).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<csv>".into(),
        message: e.to_string(),
    })?;
    Ok(String::from_utf8(bytes).expect("ASCII output"))
}

/// Pretty JSON with object keys in sorted order.
pub fn summary_json<T: Serialize>(summary: &T) -> Result<String> {
    let value = serde_json::to_value(summary).map_err(|e| Error::Config(e.to_string()))?;
    let mut s = serde_json::to_string_pretty(&value).map_err(|e| Error::Config(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| io_error(path, e))
}

/// Files written by [`emit`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Emitted {
    pub trace: Option<PathBuf>,
    pub summary: PathBuf,
}

/// Writes the trace CSV (when the run has one) and the JSON summary.
pub fn emit(report: &RunReport, trace_path: &Path, summary_path: &Path) -> Result<Emitted> {
    let trace = match &report.trace {
        Some(t) => {
            write(trace_path, &trace_csv(t)?)?;
            Some(trace_path.to_path_buf())
        }
        None => None,
    };
    write(summary_path, &summary_json(&report.summary)?)?;
    Ok(Emitted {
        trace,
        summary: summary_path.to_path_buf(),
    })
}
