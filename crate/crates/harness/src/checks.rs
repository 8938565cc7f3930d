//! Randomised numerical checks shared by the CLI and the acceptance tests.

use accelvi::geometry::{forced_symplecticity_defect, symplecticity_defect, PhasePoint};
use accelvi::objectives::{check_gradient, Objective};
use accelvi::schedules::{lagrangian_from_scheme, Schedule};
use accelvi::PhasePoint64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::CheckSettings;
use crate::error::Result;

/// Random points are drawn uniformly from this box.
pub const SAMPLE_BOX: f64 = 1.5;
/// Momenta are `a_k · v` with velocities `v` uniform in `[−V, V]`.
pub const SAMPLE_VELOCITY: f64 = 0.1;
pub const GRADIENT_FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct GradientSweep {
    pub points: usize,
    pub max_error: f64,
    pub worst_point: Vec<f64>,
}

/// Largest [`check_gradient`] error over `points` uniform points in
/// `[−half_width, half_width]^d`.
pub fn gradient_sweep(obj: &dyn Objective<f64>, points: usize, half_width: f64, seed: u64) -> Result<GradientSweep> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = GradientSweep {
        points,
        max_error: 0.0,
        worst_point: Vec::new(),
    };
    for _ in 0..points {
        let x: Vec<f64> = (0..obj.dim()).map(|_| rng.random_range(-half_width..=half_width)).collect();
        let e = check_gradient(obj, &x, GRADIENT_FD_STEP)?;
        if e >= out.max_error {
            out.max_error = e;
            out.worst_point = x;
        }
    }
    Ok(out)
}

/// One schedule/objective pair of a symplecticity sweep.
pub struct SymplecticCase<'a> {
    pub label: String,
    pub schedule: Schedule<f64>,
    pub objective: &'a dyn Objective<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaseResult {
    pub label: String,
    pub samples: usize,
    pub max_defect: f64,
    pub worst_k: usize,
    pub worst_point: Option<PhasePoint64>,
}

fn sample_point(rng: &mut ChaCha8Rng, dim: usize, a: f64) -> PhasePoint64 {
    let x = (0..dim).map(|_| rng.random_range(-SAMPLE_BOX..=SAMPLE_BOX)).collect();
    let p = (0..dim)
        .map(|_| a * rng.random_range(-SAMPLE_VELOCITY..=SAMPLE_VELOCITY))
        .collect();
    PhasePoint::new(x, p).expect("equal lengths")
}

/// Spreads `settings.points` random phase points round-robin over `cases`
/// and records the largest defect of the discrete Hamiltonian map for each.
/// The step `k` is drawn from `max(1, first_step)..k_max`.
pub fn symplecticity_sweep(cases: &[SymplecticCase<'_>], settings: &CheckSettings) -> Result<Vec<CaseResult>> {
    sweep(cases, settings, false)
}

/// As [`symplecticity_sweep`] for the map with Nesterov's forces folded in,
/// which is not symplectic; used as a negative control.
pub fn forced_sweep(cases: &[SymplecticCase<'_>], settings: &CheckSettings) -> Result<Vec<CaseResult>> {
    sweep(cases, settings, true)
}

fn sweep(cases: &[SymplecticCase<'_>], settings: &CheckSettings, forced: bool) -> Result<Vec<CaseResult>> {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let coeffs = cases
        .iter()
        .map(|c| lagrangian_from_scheme(&c.schedule, settings.k_max))
        .collect::<accelvi::Result<Vec<_>>>()?;
    let mut results: Vec<CaseResult> = cases
        .iter()
        .map(|c| CaseResult {
            label: c.label.clone(),
            samples: 0,
            max_defect: 0.0,
            worst_k: 0,
            worst_point: None,
        })
        .collect();
    if cases.is_empty() {
        return Ok(results);
    }
    for i in 0..settings.points {
        let j = i % cases.len();
        let case = &cases[j];
        let lo = case.schedule.first_step().max(1);
        let k = rng.random_range(lo..settings.k_max.max(lo + 1));
        let a = coeffs[j].a(k)?;
        let pt = sample_point(&mut rng, case.objective.dim(), a);
        let report = if forced {
            forced_symplecticity_defect(&coeffs[j], case.objective, &pt, k, settings.fd_step)?
        } else {
            symplecticity_defect(&coeffs[j], case.objective, &pt, k, settings.fd_step)?
        };
        let r = &mut results[j];
        r.samples += 1;
        if report.defect >= r.max_defect {
            r.max_defect = report.defect;
            r.worst_k = k;
            r.worst_point = Some(pt);
        }
    }
    Ok(results)
}
