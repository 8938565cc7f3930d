//! Experiment configuration: a small TOML dialect with line-numbered,
//! exhaustive validation.
//!
//! ```toml
//! iterations = 1500
//! h = 0.1
//! x0 = "preset"
//!
//! [objective]
//! name = "yatf"
//!
//! [[methods]]
//! method = "nag"
//! schedule = "classical"
//! n = 3
//! ```

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;

use accelvi::integrators::{Algorithm, Method, StopRule};
use accelvi::objectives::{make_logreg, make_quadratic, make_rosenbrock, make_yatf, Dataset, Objective};
use accelvi::schedules::{bjw_schedule, classical_schedule, constant_schedule, wwj_schedule, Schedule};
use accelvi::wwj::WwjParams;
use toml_edit::{ImDocument, Item, TableLike, Value};

use crate::error::{ConfigError, ConfigErrors, HarnessError};

pub const OBJECTIVES: [&str; 4] = ["quadratic", "rosenbrock", "yatf", "logreg"];
pub const SCHEDULES: [&str; 4] = ["classical", "wwj", "bjw", "constant"];

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Synthetic,
    /// CSV file with header `x,y`.
    Csv(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectiveSpec {
    Quadratic { rho: f64, n: usize },
    Rosenbrock { n: usize },
    Yatf,
    Logreg { dataset: DatasetSource },
}

impl ObjectiveSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ObjectiveSpec::Quadratic { .. } => "quadratic",
            ObjectiveSpec::Rosenbrock { .. } => "rosenbrock",
            ObjectiveSpec::Yatf => "yatf",
            ObjectiveSpec::Logreg { .. } => "logreg",
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            ObjectiveSpec::Quadratic { n, .. } | ObjectiveSpec::Rosenbrock { n } => *n,
            ObjectiveSpec::Yatf | ObjectiveSpec::Logreg { .. } => 2,
        }
    }

    /// Instantiates the objective, reading the dataset file if there is one.
    pub fn build(&self) -> Result<Box<dyn Objective<f64>>, HarnessError> {
        Ok(match self {
            ObjectiveSpec::Quadratic { rho, n } => Box::new(make_quadratic(*rho, *n)?),
            ObjectiveSpec::Rosenbrock { n } => Box::new(make_rosenbrock(*n)?),
            ObjectiveSpec::Yatf => Box::new(make_yatf()),
            ObjectiveSpec::Logreg { dataset } => {
                let data = match dataset {
                    DatasetSource::Synthetic => Dataset::synthetic_preset(),
                    DatasetSource::Csv(path) => crate::output::read_dataset(path)?,
                };
                Box::new(make_logreg(data)?)
            }
        })
    }

    /// The per-objective starting point used when `x0 = "preset"`.
    pub fn preset_x0(&self) -> Vec<f64> {
        match self {
            ObjectiveSpec::Quadratic { n, .. } => vec![1.0; *n],
            ObjectiveSpec::Rosenbrock { n } => vec![0.0; *n],
            ObjectiveSpec::Yatf => vec![-1.0, 0.5],
            ObjectiveSpec::Logreg { .. } => vec![0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleSpec {
    Classical { n: u32, asymptotic: bool },
    Wwj { n: u32, d: f64, asymptotic: bool },
    Bjw { n: u32, d: f64 },
    Constant { lambda: f64 },
}

impl ScheduleSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ScheduleSpec::Classical { .. } => "classical",
            ScheduleSpec::Wwj { .. } => "wwj",
            ScheduleSpec::Bjw { .. } => "bjw",
            ScheduleSpec::Constant { .. } => "constant",
        }
    }

    pub fn build(&self, h: f64) -> accelvi::Result<Schedule<f64>> {
        match *self {
            ScheduleSpec::Classical { n, asymptotic } => Ok(classical_schedule(n, h)?.with_asymptotic(asymptotic)),
            ScheduleSpec::Wwj { n, d, asymptotic } => Ok(wwj_schedule(n, d, h)?.with_asymptotic(asymptotic)),
            ScheduleSpec::Bjw { n, d } => bjw_schedule(n, d, h),
            ScheduleSpec::Constant { lambda } => constant_schedule(lambda, h),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Momentum {
        method: Method,
        schedule: ScheduleSpec,
        h: Option<f64>,
    },
    Wwj {
        p: u32,
        d: f64,
        n_weight: f64,
        h: Option<f64>,
    },
}

impl MethodSpec {
    pub fn method_name(&self) -> &'static str {
        match self {
            MethodSpec::Momentum { method, .. } => method.name(),
            MethodSpec::Wwj { .. } => "wwj",
        }
    }

    pub fn step(&self, default_h: f64) -> f64 {
        match self {
            MethodSpec::Momentum { h, .. } | MethodSpec::Wwj { h, .. } => h.unwrap_or(default_h),
        }
    }

    pub fn algorithm(&self, default_h: f64) -> accelvi::Result<Algorithm<f64>> {
        let h = self.step(default_h);
        Ok(match self {
            MethodSpec::Momentum { method, schedule, .. } => Algorithm::Momentum {
                method: *method,
                schedule: schedule.build(h)?,
            },
            MethodSpec::Wwj { p, d, n_weight, .. } => Algorithm::Wwj(WwjParams::new(*p, *d, *n_weight, h)?),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodEntry {
    /// File stem and legend label; defaults to the method name.
    pub label: String,
    pub spec: MethodSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub enum X0 {
    Preset,
    Ones,
    Zeros,
    Values(Vec<f64>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotMode {
    None,
    Svg,
}

/// Sampling settings for `check symplecticity`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckSettings {
    pub points: usize,
    pub fd_step: f64,
    pub seed: u64,
    /// Steps are drawn from `1..k_max`.
    pub k_max: usize,
    pub tolerance: f64,
}

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            points: 200,
            fd_step: 1e-5,
            seed: 0,
            k_max: 30,
            tolerance: 1e-5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub objective: ObjectiveSpec,
    pub methods: Vec<MethodEntry>,
    pub h: f64,
    pub iterations: usize,
    pub x0: X0,
    pub output_dir: PathBuf,
    pub record_stride: usize,
    pub plot: PlotMode,
    pub grad_tol: Option<f64>,
    pub f_tol: Option<f64>,
    pub divergence_bound: Option<f64>,
    pub check: CheckSettings,
}

impl ExperimentConfig {
    pub fn resolved_x0(&self) -> Vec<f64> {
        let n = self.objective.dim();
        match &self.x0 {
            X0::Preset => self.objective.preset_x0(),
            X0::Ones => vec![1.0; n],
            X0::Zeros => vec![0.0; n],
            X0::Values(v) => v.clone(),
        }
    }

    pub fn stop_rule(&self) -> StopRule<f64> {
        let mut stop = StopRule::iterations(self.iterations).with_record_every(self.record_stride);
        if let Some(t) = self.grad_tol {
            stop = stop.with_grad_tol(t);
        }
        if let Some(t) = self.f_tol {
            stop = stop.with_f_tol(t);
        }
        if let Some(b) = self.divergence_bound {
            stop = stop.with_divergence_bound(b);
        }
        stop
    }
}

const TOP_KEYS: [&str; 12] = [
    "objective",
    "methods",
    "h",
    "iterations",
    "x0",
    "output_dir",
    "record_stride",
    "plot",
    "grad_tol",
    "f_tol",
    "divergence_bound",
    "check",
];

struct Section<'a> {
    table: &'a dyn TableLike,
    line: usize,
    name: String,
}

struct Reader<'a> {
    src: &'a str,
    errors: Vec<ConfigError>,
}

impl<'a> Reader<'a> {
    fn line_at(&self, offset: usize) -> usize {
        self.src[..offset.min(self.src.len())].matches('\n').count() + 1
    }

    fn key_line(&self, s: &Section<'_>, key: &str) -> usize {
        s.table
            .key(key)
            .and_then(|k| k.span())
            .or_else(|| s.table.get(key).and_then(Item::span))
            .map_or(s.line, |r| self.line_at(r.start))
    }

    fn err(&mut self, line: usize, message: impl Into<String>) {
        self.errors.push(ConfigError {
            line,
            message: message.into(),
        });
    }

    fn check_keys(&mut self, s: &Section<'_>, allowed: &[&str]) {
        let unknown: Vec<String> = s
            .table
            .iter()
            .map(|(k, _)| k.to_string())
            .filter(|k| !allowed.contains(&k.as_str()))
            .collect();
        for k in unknown {
            let line = self.key_line(s, &k);
            self.err(line, format!("unknown key `{k}` in {}", s.name));
        }
    }

    fn value<'b>(&mut self, s: &Section<'b>, key: &str, required: bool) -> Option<&'b Value> {
        match s.table.get(key) {
            None => {
                if required {
                    self.err(s.line, format!("missing required key `{key}` in {}", s.name));
                }
                None
            }
            Some(item) => match item.as_value() {
                Some(v) => Some(v),
                None => {
                    let line = self.key_line(s, key);
                    self.err(line, format!("`{key}` must be a value, not a table"));
                    None
                }
            },
        }
    }

    fn mismatch(&mut self, s: &Section<'_>, key: &str, expected: &str, got: &Value) {
        let line = self.key_line(s, key);
        self.err(line, format!("`{key}` must be {expected}, got {}", got.type_name()));
    }

    fn float(&mut self, s: &Section<'_>, key: &str, required: bool) -> Option<f64> {
        let v = self.value(s, key, required)?;
        match v {
            Value::Float(f) => Some(*f.value()),
            Value::Integer(i) => Some(*i.value() as f64),
            other => {
                self.mismatch(s, key, "a number", other);
                None
            }
        }
    }

    fn positive(&mut self, s: &Section<'_>, key: &str, required: bool) -> Option<f64> {
        let v = self.float(s, key, required)?;
        if v > 0.0 && v.is_finite() {
            Some(v)
        } else {
            let line = self.key_line(s, key);
            self.err(line, format!("`{key}` must be positive and finite, got {v}"));
            None
        }
    }

    fn uint(&mut self, s: &Section<'_>, key: &str, required: bool, min: u64) -> Option<u64> {
        let v = self.value(s, key, required)?;
        match v {
            Value::Integer(i) if *i.value() >= min as i64 => Some(*i.value() as u64),
            Value::Integer(i) => {
                let line = self.key_line(s, key);
                self.err(line, format!("`{key}` must be at least {min}, got {}", i.value()));
                None
            }
            other => {
                self.mismatch(s, key, "an integer", other);
                None
            }
        }
    }

    fn string<'b>(&mut self, s: &Section<'b>, key: &str, required: bool) -> Option<&'b str> {
        let v = self.value(s, key, required)?;
        match v {
            Value::String(st) => Some(st.value().as_str()),
            other => {
                self.mismatch(s, key, "a string", other);
                None
            }
        }
    }

    fn boolean(&mut self, s: &Section<'_>, key: &str) -> Option<bool> {
        let v = self.value(s, key, false)?;
        match v {
            Value::Boolean(b) => Some(*b.value()),
            other => {
                self.mismatch(s, key, "a boolean", other);
                None
            }
        }
    }

    fn sub_section<'b>(&mut self, parent: &Section<'b>, key: &str, required: bool) -> Option<Section<'b>> {
        let item = match parent.table.get(key) {
            Some(item) => item,
            None => {
                if required {
                    self.err(parent.line, format!("missing required section `[{key}]`"));
                }
                return None;
            }
        };
        match item.as_table_like() {
            Some(table) => Some(Section {
                table,
                line: self.key_line(parent, key),
                name: format!("[{key}]"),
            }),
            None => {
                let line = self.key_line(parent, key);
                self.err(line, format!("`{key}` must be a table"));
                None
            }
        }
    }
}

fn parse_objective(r: &mut Reader<'_>, s: &Section<'_>) -> Option<ObjectiveSpec> {
    let name = r.string(s, "name", true)?;
    let spec = match name {
        "quadratic" => {
            r.check_keys(s, &["name", "rho", "n"]);
            let rho = r.float(s, "rho", true);
            let n = r.uint(s, "n", true, 1);
            if let Some(rho) = rho {
                if !(rho.abs() < 1.0) {
                    let line = r.key_line(s, "rho");
                    r.err(line, format!("`rho` must satisfy |rho| < 1, got {rho}"));
                    return None;
                }
            }
            ObjectiveSpec::Quadratic {
                rho: rho?,
                n: n? as usize,
            }
        }
        "rosenbrock" => {
            r.check_keys(s, &["name", "n"]);
            ObjectiveSpec::Rosenbrock {
                n: r.uint(s, "n", true, 2)? as usize,
            }
        }
        "yatf" => {
            r.check_keys(s, &["name"]);
            ObjectiveSpec::Yatf
        }
        "logreg" => {
            r.check_keys(s, &["name", "dataset"]);
            let dataset = match r.string(s, "dataset", false) {
                None | Some("synthetic") => DatasetSource::Synthetic,
                Some(path) => DatasetSource::Csv(PathBuf::from(path)),
            };
            ObjectiveSpec::Logreg { dataset }
        }
        other => {
            let line = r.key_line(s, "name");
            r.err(
                line,
                format!("unknown objective `{other}` (expected one of {})", OBJECTIVES.join(", ")),
            );
            return None;
        }
    };
    Some(spec)
}

fn parse_schedule(r: &mut Reader<'_>, s: &Section<'_>, h: Option<f64>) -> Option<ScheduleSpec> {
    let name = r.string(s, "schedule", true)?;
    let spec = match name {
        "classical" => ScheduleSpec::Classical {
            n: r.uint(s, "n", true, 2)? as u32,
            asymptotic: r.boolean(s, "asymptotic").unwrap_or(false),
        },
        "wwj" => {
            let n = r.uint(s, "n", true, 3);
            let d = r.positive(s, "d", true);
            ScheduleSpec::Wwj {
                n: n? as u32,
                d: d?,
                asymptotic: r.boolean(s, "asymptotic").unwrap_or(false),
            }
        }
        "bjw" => {
            let n = r.uint(s, "n", true, 2);
            let d = r.positive(s, "d", true);
            ScheduleSpec::Bjw { n: n? as u32, d: d? }
        }
        "constant" => ScheduleSpec::Constant {
            lambda: r.positive(s, "lambda", true)?,
        },
        other => {
            let line = r.key_line(s, "schedule");
            r.err(
                line,
                format!("unknown schedule `{other}` (expected one of {})", SCHEDULES.join(", ")),
            );
            return None;
        }
    };
    if let Some(h) = h {
        if let Err(e) = spec.build(h) {
            let line = r.key_line(s, "schedule");
            r.err(line, e.to_string());
            return None;
        }
    }
    Some(spec)
}

fn schedule_keys(name: &str) -> &'static [&'static str] {
    match name {
        "classical" => &["n", "asymptotic"],
        "wwj" => &["n", "d", "asymptotic"],
        "bjw" => &["n", "d"],
        "constant" => &["lambda"],
        _ => &[],
    }
}

fn parse_method(
    r: &mut Reader<'_>,
    s: &Section<'_>,
    global_h: Option<f64>,
    objective: Option<&dyn Objective<f64>>,
) -> Option<MethodEntry> {
    let method = r.string(s, "method", true)?;
    let label = r.string(s, "label", false).map(str::to_string);
    let h = r.positive(s, "h", false);
    let step = h.or(global_h);
    let spec = if method == "wwj" {
        r.check_keys(s, &["method", "label", "h", "p", "d", "n_weight"]);
        let p = r.uint(s, "p", true, 2);
        let d = r.positive(s, "d", true);
        let n_weight = r.positive(s, "n_weight", true);
        let p = p? as u32;
        if p > 3 {
            let line = r.key_line(s, "p");
            r.err(line, format!("`p` must be 2 or 3, got {p}"));
            return None;
        }
        if p == 3 {
            if let Some(obj) = objective {
                if !obj.has_hessian() {
                    let line = r.key_line(s, "p");
                    r.err(line, format!("wwj with p = 3 needs a Hessian, which `{}` does not provide", obj.name()));
                    return None;
                }
            }
        }
        MethodSpec::Wwj {
            p,
            d: d?,
            n_weight: n_weight?,
            h,
        }
    } else {
        let m = match method.parse::<Method>() {
            Ok(m) => m,
            Err(_) => {
                let line = r.key_line(s, "method");
                r.err(line, format!("unknown method `{method}` (expected gd, cm, nag or wwj)"));
                return None;
            }
        };
        let sched_name = r.string(s, "schedule", false).unwrap_or("");
        let mut allowed = vec!["method", "label", "h", "schedule"];
        allowed.extend_from_slice(schedule_keys(sched_name));
        r.check_keys(s, &allowed);
        MethodSpec::Momentum {
            method: m,
            schedule: parse_schedule(r, s, step)?,
            h,
        }
    };
    Some(MethodEntry {
        label: label.unwrap_or_else(|| spec.method_name().to_string()),
        spec,
    })
}

fn parse_x0(r: &mut Reader<'_>, s: &Section<'_>, dim: Option<usize>) -> Option<X0> {
    let v = r.value(s, "x0", false);
    let x0 = match v {
        None => X0::Preset,
        Some(Value::String(st)) => match st.value().as_str() {
            "preset" => X0::Preset,
            "ones" => X0::Ones,
            "zeros" => X0::Zeros,
            other => {
                let line = r.key_line(s, "x0");
                r.err(line, format!("unknown x0 preset `{other}` (expected preset, ones, zeros or an array)"));
                return None;
            }
        },
        Some(Value::Array(arr)) => {
            let mut vals = Vec::with_capacity(arr.len());
            for item in arr.iter() {
                match item {
                    Value::Float(f) => vals.push(*f.value()),
                    Value::Integer(i) => vals.push(*i.value() as f64),
                    other => {
                        r.mismatch(s, "x0", "an array of numbers", other);
                        return None;
                    }
                }
            }
            if vals.iter().any(|v| !v.is_finite()) {
                let line = r.key_line(s, "x0");
                r.err(line, "`x0` entries must be finite");
                return None;
            }
            X0::Values(vals)
        }
        Some(other) => {
            r.mismatch(s, "x0", "a preset name or an array", other);
            return None;
        }
    };
    if let (X0::Values(vals), Some(n)) = (&x0, dim) {
        if vals.len() != n {
            let line = r.key_line(s, "x0");
            r.err(line, format!("`x0` has {} entries but the objective has dimension {n}", vals.len()));
            return None;
        }
    }
    Some(x0)
}

fn parse_check(r: &mut Reader<'_>, root: &Section<'_>) -> CheckSettings {
    let mut c = CheckSettings::default();
    let Some(s) = r.sub_section(root, "check", false) else {
        return c;
    };
    r.check_keys(&s, &["points", "fd_step", "seed", "k_max", "tolerance"]);
    if let Some(v) = r.uint(&s, "points", false, 1) {
        c.points = v as usize;
    }
    if let Some(v) = r.positive(&s, "fd_step", false) {
        c.fd_step = v;
    }
    if let Some(v) = r.uint(&s, "seed", false, 0) {
        c.seed = v;
    }
    if let Some(v) = r.uint(&s, "k_max", false, 2) {
        c.k_max = v as usize;
    }
    if let Some(v) = r.positive(&s, "tolerance", false) {
        c.tolerance = v;
    }
    c
}

/// Parses and fully validates a configuration, reporting every problem found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigErrors> {
    let doc = ImDocument::parse(text).map_err(|e| {
        let line = e.span().map_or(1, |r| text[..r.start.min(text.len())].matches('\n').count() + 1);
        ConfigErrors(vec![ConfigError {
            line,
            message: format!("syntax error: {}", e.message().trim()),
        }])
    })?;
    let mut r = Reader {
        src: text,
        errors: Vec::new(),
    };
    let root = Section {
        table: doc.as_table(),
        line: 1,
        name: "the top level".into(),
    };
    r.check_keys(&root, &TOP_KEYS);

    let objective = r
        .sub_section(&root, "objective", true)
        .and_then(|s| parse_objective(&mut r, &s));
    // only used for the hessian check; dataset files are read later
    let built = objective.as_ref().and_then(|o| match o {
        ObjectiveSpec::Logreg {
            dataset: DatasetSource::Csv(_),
        } => None,
        o => o.build().ok(),
    });

    let h = r.positive(&root, "h", true);
    let iterations = r.uint(&root, "iterations", true, 1).map(|v| v as usize);
    let record_stride = r.uint(&root, "record_stride", false, 1).map_or(1, |v| v as usize);
    let x0 = parse_x0(&mut r, &root, objective.as_ref().map(ObjectiveSpec::dim));
    let output_dir = r.string(&root, "output_dir", false).map_or_else(|| PathBuf::from("out"), PathBuf::from);
    let plot = match r.string(&root, "plot", false) {
        None | Some("none") => PlotMode::None,
        Some("svg") => PlotMode::Svg,
        Some(other) => {
            let line = r.key_line(&root, "plot");
            r.err(line, format!("`plot` must be \"none\" or \"svg\", got `{other}`"));
            PlotMode::None
        }
    };
    let grad_tol = r.float(&root, "grad_tol", false);
    let f_tol = r.float(&root, "f_tol", false);
    let divergence_bound = r.positive(&root, "divergence_bound", false);
    for (key, v) in [("grad_tol", grad_tol), ("f_tol", f_tol)] {
        if let Some(v) = v {
            if !(v >= 0.0 && v.is_finite()) {
                let line = r.key_line(&root, key);
                r.err(line, format!("`{key}` must be nonnegative and finite, got {v}"));
            }
        }
    }
    let check = parse_check(&mut r, &root);

    let methods = parse_methods(&mut r, &root, h, built.as_deref());

    if !r.errors.is_empty() {
        r.errors.sort_by_key(|e| e.line);
        return Err(ConfigErrors(r.errors));
    }
    Ok(ExperimentConfig {
        objective: objective.expect("no errors"),
        methods,
        h: h.expect("no errors"),
        iterations: iterations.expect("no errors"),
        x0: x0.expect("no errors"),
        output_dir,
        record_stride,
        plot,
        grad_tol,
        f_tol,
        divergence_bound,
        check,
    })
}

fn parse_methods(
    r: &mut Reader<'_>,
    root: &Section<'_>,
    h: Option<f64>,
    objective: Option<&dyn Objective<f64>>,
) -> Vec<MethodEntry> {
    let Some(item) = root.table.get("methods") else {
        r.err(1, "missing required `methods` (use one [[methods]] table per method)");
        return Vec::new();
    };
    let header_line = r.key_line(root, "methods");
    let tables: Vec<(&dyn TableLike, usize)> = if let Some(aot) = item.as_array_of_tables() {
        aot.iter()
            .map(|t| (t as &dyn TableLike, t.span().map_or(header_line, |sp| r.line_at(sp.start))))
            .collect()
    } else if let Some(arr) = item.as_array() {
        let mut out = Vec::new();
        for v in arr.iter() {
            match v.as_inline_table() {
                Some(t) => out.push((t as &dyn TableLike, v.span().map_or(header_line, |sp| r.line_at(sp.start)))),
                None => r.err(header_line, "every entry of `methods` must be a table"),
            }
        }
        out
    } else {
        r.err(header_line, "`methods` must be an array of tables");
        return Vec::new();
    };
    if tables.is_empty() {
        r.err(header_line, "`methods` must not be empty");
    }
    let mut methods = Vec::new();
    let mut labels = HashSet::new();
    for (i, (table, line)) in tables.into_iter().enumerate() {
        let s = Section {
            table,
            line,
            name: format!("methods[{i}]"),
        };
        if let Some(m) = parse_method(r, &s, h, objective) {
            if !labels.insert(m.label.clone()) {
                r.err(
                    line,
                    format!("duplicate method label `{}`; set `label` to tell the runs apart", m.label),
                );
            } else if m.label.is_empty() || m.label.contains(['/', '\\']) {
                r.err(line, format!("label `{}` cannot be used as a file name", m.label));
            } else {
                methods.push(m);
            }
        }
    }
    methods
}

struct Float(f64);

impl fmt::Display for Float {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Debug gives the shortest representation that round-trips
        let s = format!("{:?}", self.0);
        f.write_str(&s)
    }
}

fn quote(s: &str) -> String {
    let escaped: String = s
        .chars()
        .flat_map(|c| match c {
            '"' => vec!['\\', '"'],
            '\\' => vec!['\\', '\\'],
            c => vec![c],
        })
        .collect();
    format!("\"{escaped}\"")
}

/// Writes `cfg` in the format accepted by [`parse_config`].
pub fn serialize(cfg: &ExperimentConfig) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("iterations = {}", cfg.iterations));
    line(format!("h = {}", Float(cfg.h)));
    line(format!(
        "x0 = {}",
        match &cfg.x0 {
            X0::Preset => quote("preset"),
            X0::Ones => quote("ones"),
            X0::Zeros => quote("zeros"),
            X0::Values(v) => format!("[{}]", v.iter().map(|x| Float(*x).to_string()).collect::<Vec<_>>().join(", ")),
        }
    ));
    line(format!("output_dir = {}", quote(&cfg.output_dir.to_string_lossy())));
    line(format!("record_stride = {}", cfg.record_stride));
    line(format!(
        "plot = {}",
        quote(match cfg.plot {
            PlotMode::None => "none",
            PlotMode::Svg => "svg",
        })
    ));
    if let Some(v) = cfg.grad_tol {
        line(format!("grad_tol = {}", Float(v)));
    }
    if let Some(v) = cfg.f_tol {
        line(format!("f_tol = {}", Float(v)));
    }
    if let Some(v) = cfg.divergence_bound {
        line(format!("divergence_bound = {}", Float(v)));
    }
    line(String::new());
    line("[objective]".into());
    line(format!("name = {}", quote(cfg.objective.name())));
    match &cfg.objective {
        ObjectiveSpec::Quadratic { rho, n } => {
            line(format!("rho = {}", Float(*rho)));
            line(format!("n = {n}"));
        }
        ObjectiveSpec::Rosenbrock { n } => line(format!("n = {n}")),
        ObjectiveSpec::Yatf => {}
        ObjectiveSpec::Logreg { dataset } => line(format!(
            "dataset = {}",
            match dataset {
                DatasetSource::Synthetic => quote("synthetic"),
                DatasetSource::Csv(p) => quote(&p.to_string_lossy()),
            }
        )),
    }
    if cfg.check != CheckSettings::default() {
        let c = cfg.check;
        line(String::new());
        line("[check]".into());
        line(format!("points = {}", c.points));
        line(format!("fd_step = {}", Float(c.fd_step)));
        line(format!("seed = {}", c.seed));
        line(format!("k_max = {}", c.k_max));
        line(format!("tolerance = {}", Float(c.tolerance)));
    }
    for m in &cfg.methods {
        line(String::new());
        line("[[methods]]".into());
        line(format!("method = {}", quote(m.spec.method_name())));
        line(format!("label = {}", quote(&m.label)));
        match &m.spec {
            MethodSpec::Momentum { schedule, h, .. } => {
                if let Some(h) = h {
                    line(format!("h = {}", Float(*h)));
                }
                line(format!("schedule = {}", quote(schedule.name())));
                match *schedule {
                    ScheduleSpec::Classical { n, asymptotic } => {
                        line(format!("n = {n}"));
                        line(format!("asymptotic = {asymptotic}"));
                    }
                    ScheduleSpec::Wwj { n, d, asymptotic } => {
                        line(format!("n = {n}"));
                        line(format!("d = {}", Float(d)));
                        line(format!("asymptotic = {asymptotic}"));
                    }
                    ScheduleSpec::Bjw { n, d } => {
                        line(format!("n = {n}"));
                        line(format!("d = {}", Float(d)));
                    }
                    ScheduleSpec::Constant { lambda } => line(format!("lambda = {}", Float(lambda))),
                }
            }
            MethodSpec::Wwj { p, d, n_weight, h } => {
                if let Some(h) = h {
                    line(format!("h = {}", Float(*h)));
                }
                line(format!("p = {p}"));
                line(format!("d = {}", Float(*d)));
                line(format!("n_weight = {}", Float(*n_weight)));
            }
        }
    }
    out
}
