//! Long-format trajectory CSV and JSON output.

use std::io::Write;
use std::path::Path;

use curved_nbody::geometry::Vec4;
use curved_nbody::integrator::TrajectorySample;
use serde::Serialize;

use crate::error::CliError;

pub const TRAJECTORY_HEADER: [&str; 10] = ["t", "body", "w", "x", "y", "z", "vw", "vx", "vy", "vz"];

/// 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}

pub fn write_trajectory(path: &Path, samples: &[TrajectorySample]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_err(path, e))?;
    w.write_record(TRAJECTORY_HEADER).map_err(|e| io_err(path, e))?;
    for s in samples {
        for i in 0..s.state.n() {
            let mut row = vec![fmt_f64(s.t), i.to_string()];
            row.extend(s.state.q[i].to_array().iter().map(|&x| fmt_f64(x)));
            row.extend(s.state.v[i].to_array().iter().map(|&x| fmt_f64(x)));
            w.write_record(&row).map_err(|e| io_err(path, e))?;
        }
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// One sample of a trajectory file: time, positions, velocities.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSample {
    pub t: f64,
    pub q: Vec<Vec4<f64>>,
    pub v: Vec<Vec4<f64>>,
}

/// Reads a long-format trajectory; rows of one sample share `t` and list
/// bodies `0..n` in order.
pub fn read_trajectory(path: &Path) -> Result<Vec<RawSample>, CliError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let headers = r.headers().map_err(|e| io_err(path, e))?.clone();
    if headers.iter().map(str::trim).ne(TRAJECTORY_HEADER) {
        return Err(CliError::Config(format!(
            "{}: expected header {}",
            path.display(),
            TRAJECTORY_HEADER.join(",")
        )));
    }
    let mut out: Vec<RawSample> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let num = |c: usize| -> Result<f64, CliError> {
            rec[c].trim().parse::<f64>().map_err(|e| io_err(path, format!("row {}: column {}: {e}", line + 2, TRAJECTORY_HEADER[c])))
        };
        let t = num(0)?;
        let body: usize = rec[1].trim().parse().map_err(|e| io_err(path, format!("row {}: body: {e}", line + 2)))?;
        let q = Vec4::new(num(2)?, num(3)?, num(4)?, num(5)?);
        let v = Vec4::new(num(6)?, num(7)?, num(8)?, num(9)?);
        let new_sample = body == 0;
        if new_sample {
            out.push(RawSample { t, q: vec![], v: vec![] });
        }
        let s = out
            .last_mut()
            .filter(|s| s.t == t && s.q.len() == body)
            .ok_or_else(|| io_err(path, format!("row {}: bodies must be listed 0..n for each time", line + 2)))?;
        s.q.push(q);
        s.v.push(v);
    }
    if let Some(n) = out.first().map(|s| s.q.len()) {
        if out.iter().any(|s| s.q.len() != n) {
            return Err(io_err(path, "every sample must list the same bodies"));
        }
    }
    Ok(out)
}

pub fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n").map_err(|e| io_err(p, e)),
        None => {
            let mut out = std::io::stdout().lock();
            match writeln!(out, "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Config(e.to_string())),
                _ => Ok(()),
            }
        }
    }
}
