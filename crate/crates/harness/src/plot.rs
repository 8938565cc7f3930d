//! Self-contained SVG line plots.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{HarnessError, Result};
use crate::experiment::RunRecord;

/// Values at or below zero are drawn at this floor on log axes.
pub const LOG_FLOOR: f64 = 1e-300;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 560.0;
const LEFT: f64 = 80.0;
const RIGHT: f64 = 170.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 60.0;
const COLORS: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    FvalsLoglog,
    Trajectory2d,
}

impl PlotKind {
    pub fn name(self) -> &'static str {
        match self {
            PlotKind::FvalsLoglog => "fvals_loglog",
            PlotKind::Trajectory2d => "trajectory_2d",
        }
    }
}

impl FromStr for PlotKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fvals_loglog" => Ok(PlotKind::FvalsLoglog),
            "trajectory_2d" => Ok(PlotKind::Trajectory2d),
            other => Err(HarnessError::Plot(format!("unknown plot kind `{other}`"))),
        }
    }
}

/// What is subtracted from `f` before plotting on log axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Baseline {
    /// The objective's known optimal value.
    Optimum(f64),
    /// Nothing; every recorded value is positive.
    Raw,
    /// The smallest value seen in any run, used when `f*` is unknown and
    /// raw values are not all positive.
    ObservedMin(f64),
}

impl Baseline {
    fn offset(self) -> f64 {
        match self {
            Baseline::Optimum(v) | Baseline::ObservedMin(v) => v,
            Baseline::Raw => 0.0,
        }
    }

    fn axis_label(self) -> String {
        match self {
            Baseline::Optimum(_) => "f(x_k) − f*".into(),
            Baseline::Raw => "f(x_k)".into(),
            Baseline::ObservedMin(_) => "f(x_k) − min observed f".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotOutput {
    pub path: PathBuf,
    /// Points that were non-positive (or non-finite) on a log axis.
    pub clipped: usize,
}

/// The `(k, f − baseline)` series for `k ≥ 1`, with non-positive values set
/// to [`LOG_FLOOR`]. Non-finite values are dropped. Both count as clipped.
pub fn fvals_series(rec: &RunRecord) -> (Vec<Series>, Baseline, usize) {
    let finite = || {
        rec.runs
            .iter()
            .filter_map(|r| r.trajectory())
            .flat_map(|t| t.records.iter().map(|r| r.f))
            .filter(|f| f.is_finite())
    };
    let baseline = match rec.f_star {
        Some(v) => Baseline::Optimum(v),
        None if finite().all(|f| f > 0.0) => Baseline::Raw,
        None => Baseline::ObservedMin(finite().fold(f64::INFINITY, f64::min)),
    };
    let mut clipped = 0;
    let series = rec
        .runs
        .iter()
        .filter_map(|run| run.trajectory().map(|t| (run, t)))
        .map(|(run, t)| {
            let mut points = Vec::with_capacity(t.records.len());
            for r in t.records.iter().filter(|r| r.k >= 1) {
                let y = r.f - baseline.offset();
                if !y.is_finite() {
                    clipped += 1;
                } else if y <= 0.0 {
                    clipped += 1;
                    points.push((r.k as f64, LOG_FLOOR));
                } else {
                    points.push((r.k as f64, y));
                }
            }
            Series {
                label: run.label.clone(),
                points,
            }
        })
        .collect();
    (series, baseline, clipped)
}

/// Paths through the `(x1, x2)` plane, starting at `x0`.
pub fn trajectory_series(rec: &RunRecord) -> Result<Vec<Series>> {
    if rec.dim() != 2 {
        return Err(HarnessError::Plot(format!(
            "trajectory_2d needs a two-dimensional objective, got dimension {}",
            rec.dim()
        )));
    }
    Ok(rec
        .runs
        .iter()
        .filter_map(|run| run.trajectory().map(|t| (run, t)))
        .map(|(run, t)| Series {
            label: run.label.clone(),
            points: t
                .records
                .iter()
                .filter(|r| r.x.iter().all(|v| v.is_finite()))
                .map(|r| (r.x[0], r.x[1]))
                .collect(),
        })
        .collect())
}

struct Axis {
    lo: f64,
    hi: f64,
    log: bool,
}

impl Axis {
    fn new(values: impl Iterator<Item = f64>, log: bool) -> Self {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in values.filter(|v| v.is_finite() && (!log || *v > LOG_FLOOR)) {
            let v = if log { v.log10() } else { v };
            lo = lo.min(v);
            hi = hi.max(v);
        }
        if !lo.is_finite() {
            (lo, hi) = (0.0, 1.0);
        }
        if log {
            (lo, hi) = (lo.floor(), hi.ceil());
        }
        if hi - lo < 1e-12 {
            (lo, hi) = (lo - 0.5, hi + 0.5);
        } else if !log {
            let pad = 0.05 * (hi - lo);
            (lo, hi) = (lo - pad, hi + pad);
        }
        Self { lo, hi, log }
    }

    /// Position in `[0, 1]`, clamped.
    fn frac(&self, v: f64) -> f64 {
        let v = if self.log { v.max(LOG_FLOOR).log10() } else { v };
        ((v - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }

    fn ticks(&self) -> Vec<(f64, String)> {
        if self.log {
            let decades = (self.hi - self.lo).round() as i64;
            let step = (decades / 10).max(1);
            (self.lo as i64..=self.hi as i64)
                .filter(|e| (e - self.lo as i64) % step == 0)
                .map(|e| (10f64.powi(e as i32), format!("1e{e}")))
                .collect()
        } else {
            let raw = (self.hi - self.lo) / 6.0;
            let mag = 10f64.powf(raw.log10().floor());
            let step = [1.0, 2.0, 5.0, 10.0].iter().map(|m| m * mag).find(|s| *s >= raw).unwrap_or(10.0 * mag);
            let decimals = (-step.log10().floor()).max(0.0) as usize;
            let first = (self.lo / step).ceil() as i64;
            let last = (self.hi / step).floor() as i64;
            (first..=last)
                .map(|i| {
                    let v = i as f64 * step;
                    let label = format!("{v:.decimals$}");
                    // avoid "-0"
                    let label = if label.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
                        label.trim_start_matches('-').to_string()
                    } else {
                        label
                    };
                    (v, label)
                })
                .collect()
        }
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn svg(title: &str, xlabel: &str, ylabel: &str, series: &[Series], x: &Axis, y: &Axis, markers: &[(f64, f64, &str)]) -> String {
    let pw = WIDTH - LEFT - RIGHT;
    let ph = HEIGHT - TOP - BOTTOM;
    let px = |v: f64| LEFT + x.frac(v) * pw;
    let py = |v: f64| TOP + (1.0 - y.frac(v)) * ph;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#, LEFT + pw / 2.0, escape(title));
    let _ = writeln!(s, r#"<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#);
    for (v, label) in x.ticks() {
        let xp = px(v);
        let _ = writeln!(s, r##"<line x1="{xp:.2}" y1="{TOP}" x2="{xp:.2}" y2="{}" stroke="#ddd"/>"##, TOP + ph);
        let _ = writeln!(s, r#"<text x="{xp:.2}" y="{}" text-anchor="middle">{label}</text>"#, TOP + ph + 18.0);
    }
    for (v, label) in y.ticks() {
        let yp = py(v);
        let _ = writeln!(s, r##"<line x1="{LEFT}" y1="{yp:.2}" x2="{}" y2="{yp:.2}" stroke="#ddd"/>"##, LEFT + pw);
        let _ = writeln!(s, r#"<text x="{}" y="{:.2}" text-anchor="end">{label}</text>"#, LEFT - 6.0, yp + 4.0);
    }
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#, LEFT + pw / 2.0, HEIGHT - 15.0, escape(xlabel));
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{1}</text>"#,
        TOP + ph / 2.0,
        escape(ylabel)
    );
    for (i, ser) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = ser.points.iter().map(|&(a, b)| format!("{:.2},{:.2}", px(a), py(b))).collect();
        let _ = writeln!(
            s,
            r#"<polyline class="series" data-label="{}" fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            escape(&ser.label),
            pts.join(" ")
        );
        let ly = TOP + 10.0 + 20.0 * i as f64;
        let lx = LEFT + pw + 15.0;
        let _ = writeln!(s, r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="3"/>"#, lx + 25.0);
        let _ = writeln!(s, r#"<text class="legend" x="{}" y="{}">{}</text>"#, lx + 32.0, ly + 4.0, escape(&ser.label));
    }
    for &(a, b, what) in markers {
        let _ = writeln!(
            s,
            r#"<circle class="marker" cx="{:.2}" cy="{:.2}" r="4" fill="none" stroke="black"><title>{}</title></circle>"#,
            px(a),
            py(b),
            escape(what)
        );
    }
    s.push_str("</svg>\n");
    s
}

/// Renders `kind` to `path`; the clipped count is also reported on stderr.
pub fn render_plot(rec: &RunRecord, kind: PlotKind, path: &Path) -> Result<PlotOutput> {
    let title = format!("{} · {}", rec.config.objective.name(), kind.name());
    let (text, clipped) = match kind {
        PlotKind::FvalsLoglog => {
            let (series, baseline, clipped) = fvals_series(rec);
            let xs = Axis::new(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)), true);
            let ys = Axis::new(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)), true);
            (svg(&title, "k", &baseline.axis_label(), &series, &xs, &ys, &[]), clipped)
        }
        PlotKind::Trajectory2d => {
            let series = trajectory_series(rec)?;
            let all = || series.iter().flat_map(|s| s.points.iter());
            let xs = Axis::new(all().map(|p| p.0).chain([rec.x0[0]]), false);
            let ys = Axis::new(all().map(|p| p.1).chain([rec.x0[1]]), false);
            let markers = [(rec.x0[0], rec.x0[1], "x0")];
            (svg(&title, "x1", "x2", &series, &xs, &ys, &markers), 0)
        }
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| HarnessError::io(parent, e))?;
    }
    fs::write(path, text).map_err(|e| HarnessError::io(path, e))?;
    if clipped > 0 {
        eprintln!(
            "warning: {clipped} non-positive or non-finite values clipped in {}",
            path.display()
        );
    }
    Ok(PlotOutput {
        path: path.to_path_buf(),
        clipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_ticks_span_decades() {
        let a = Axis::new([3e-7, 20.0].into_iter(), true);
        assert_eq!((a.lo, a.hi), (-7.0, 2.0));
        assert_eq!(a.ticks().len(), 10);
        assert_eq!(a.frac(1e-7), 0.0);
        assert_eq!(a.frac(0.0), 0.0);
    }

    #[test]
    fn linear_ticks_are_round() {
        let a = Axis::new([-1.0, 1.0].into_iter(), false);
        let t = a.ticks();
        assert!(t.iter().any(|(v, l)| *v == 0.0 && l == "0.0"));
        let b = Axis::new([-1.3, -0.8].into_iter(), false);
        assert!(b.ticks().iter().any(|(_, l)| l == "-1.2"));
        assert!(t.len() >= 4 && t.len() <= 12);
    }

    #[test]
    fn plot_kind_names() {
        for k in [PlotKind::FvalsLoglog, PlotKind::Trajectory2d] {
            assert_eq!(k.name().parse::<PlotKind>().unwrap(), k);
        }
        assert!("bar".parse::<PlotKind>().is_err());
    }
}
