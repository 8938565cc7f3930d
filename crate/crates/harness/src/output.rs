use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use accelvi::objectives::Dataset;

use crate::config::serialize;
use crate::error::{HarnessError, Result};
use crate::experiment::RunRecord;

pub const MANIFEST: &str = "manifest.txt";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        v.to_string()
    }
}

pub fn csv_header(dim: usize) -> Vec<String> {
    let mut h = vec!["k".to_string(), "f".into(), "gradnorm".into()];
    h.extend((1..=dim).map(|i| format!("x{i}")));
    h
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

/// Writes one `<label>.csv` per method that produced a trajectory, plus a
/// manifest. Returns the CSV paths in method order.
pub fn write_csv(rec: &RunRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let mut paths = Vec::new();
    for run in &rec.runs {
        let Some(traj) = run.trajectory() else { continue };
        let path = dir.join(format!("{}.csv", run.label));
        let mut w = csv::Writer::from_path(&path).map_err(csv_err(&path))?;
        w.write_record(csv_header(rec.dim())).map_err(csv_err(&path))?;
        for r in &traj.records {
            let mut row = vec![r.k.to_string(), format_number(r.f), format_number(r.grad_norm)];
            row.extend(r.x.iter().map(|&v| format_number(v)));
            w.write_record(&row).map_err(csv_err(&path))?;
        }
        w.flush().map_err(|e| HarnessError::io(&path, e))?;
        paths.push(path);
    }
    let manifest = dir.join(MANIFEST);
    fs::write(&manifest, manifest_text(rec)).map_err(|e| HarnessError::io(&manifest, e))?;
    Ok(paths)
}

/// Status comments followed by the configuration, so the manifest can be fed
/// back to the CLI.
pub fn manifest_text(rec: &RunRecord) -> String {
    let mut out = String::new();
    let x0: Vec<String> = rec.x0.iter().map(|v| format!("{v:?}")).collect();
    let _ = writeln!(out, "# objective: {} (dim {})", rec.config.objective.name(), rec.dim());
    let _ = writeln!(out, "# x0: [{}]", x0.join(", "));
    for run in &rec.runs {
        let status = match &run.outcome {
            Err(e) => format!("failed: {e}"),
            Ok(t) if t.diverged() => format!("diverged at k = {}", t.diverged_at.unwrap_or(0)),
            Ok(t) => format!("{:?} after k = {}, f = {}", t.stop_reason, t.last().k, format_number(t.last().f)),
        };
        let _ = writeln!(out, "# {} ({}): {status}; wall time {:.6} s", run.label, run.method, run.wall_time);
    }
    out.push('\n');
    out.push_str(&serialize(&rec.config));
    out
}

/// Reads a logistic-regression dataset from a CSV file with header `x,y`.
pub fn read_dataset(path: &Path) -> Result<Dataset<f64>> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    if header.iter().collect::<Vec<_>>() != ["x", "y"] {
        return Err(HarnessError::Data {
            path: path.to_path_buf(),
            message: format!("expected header `x,y`, found `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (i, row) in r.records().enumerate() {
        let row = row.map_err(csv_err(path))?;
        let parse = |j: usize| -> Result<f64> {
            row[j].parse::<f64>().map_err(|e| HarnessError::Data {
                path: path.to_path_buf(),
                message: format!("row {}: `{}`: {e}", i + 2, &row[j]),
            })
        };
        xs.push(parse(0)?);
        ys.push(parse(1)?);
    }
    Dataset::new(xs, ys).map_err(|e| HarnessError::Data {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}
