use std::time::Instant;

use accelvi::integrators::{count_local_maxima, run_algorithm};
use accelvi::objectives::{MinimumKind, Objective};
use accelvi::Trajectory64;

use crate::config::ExperimentConfig;
use crate::error::Result;

/// Iterations ignored by the oscillation count.
pub const OSCILLATION_SKIP: usize = 10;

#[derive(Debug, Clone)]
pub struct MethodRun {
    pub label: String,
    pub method: &'static str,
    /// The trajectory, or the error message if the method could not run.
    pub outcome: std::result::Result<Trajectory64, String>,
    pub wall_time: f64,
}

impl MethodRun {
    pub fn diverged(&self) -> bool {
        self.outcome.as_ref().is_ok_and(|t| t.diverged())
    }

    pub fn failed(&self) -> bool {
        self.outcome.is_err()
    }

    pub fn trajectory(&self) -> Option<&Trajectory64> {
        self.outcome.as_ref().ok()
    }

    /// Strict local maxima of `k ↦ f(x_k)` after the first
    /// [`OSCILLATION_SKIP`] records.
    pub fn oscillations(&self) -> Option<usize> {
        self.trajectory().map(|t| count_local_maxima(&t.fvals(), OSCILLATION_SKIP))
    }
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: ExperimentConfig,
    pub x0: Vec<f64>,
    /// Exact optimal value when the objective knows it.
    pub f_star: Option<f64>,
    pub runs: Vec<MethodRun>,
}

impl RunRecord {
    /// No method errored and none diverged.
    pub fn success(&self) -> bool {
        self.runs.iter().all(|r| !r.failed() && !r.diverged())
    }

    pub fn run(&self, label: &str) -> Option<&MethodRun> {
        self.runs.iter().find(|r| r.label == label)
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }
}

fn exact_optimum(obj: &dyn Objective<f64>) -> Option<f64> {
    obj.minima()
        .into_iter()
        .filter(|m| m.kind == MinimumKind::Global && m.exact)
        .find_map(|m| m.value)
}

/// Runs every configured method from the shared starting point, one thread
/// per method. A failing method is recorded and does not stop the others.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunRecord> {
    let obj = cfg.objective.build()?;
    let x0 = cfg.resolved_x0();
    let stop = cfg.stop_rule();
    let obj: &dyn Objective<f64> = obj.as_ref();
    let runs = std::thread::scope(|scope| {
        let handles: Vec<_> = cfg
            .methods
            .iter()
            .map(|m| {
                let (x0, stop) = (&x0, &stop);
                scope.spawn(move || {
                    let start = Instant::now();
                    let outcome = m
                        .spec
                        .algorithm(cfg.h)
                        .and_then(|alg| run_algorithm(obj, &alg, x0, stop))
                        .map_err(|e| e.to_string());
                    MethodRun {
                        label: m.label.clone(),
                        method: m.spec.method_name(),
                        outcome,
                        wall_time: start.elapsed().as_secs_f64(),
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .zip(&cfg.methods)
            .map(|(h, m)| {
                h.join().unwrap_or_else(|_| MethodRun {
                    label: m.label.clone(),
                    method: m.spec.method_name(),
                    outcome: Err("worker panicked".into()),
                    wall_time: 0.0,
                })
            })
            .collect()
    });
    Ok(RunRecord {
        config: cfg.clone(),
        x0,
        f_star: exact_optimum(obj),
        runs,
    })
}
