//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use accelvi::integrators::{
    cm_step, forced_del_step, nag_step, nag_x_recursion, nag_y_recursion, run, Method, OptimizerState, StopRule,
};
use accelvi::linalg::Matrix;
use accelvi::objectives::{make_logreg, make_quadratic, make_rosenbrock, make_yatf, Dataset, Objective, QuadraticForm};
use accelvi::schedules::{
    bjw_schedule, classical_schedule, constant_schedule, lagrangian_from_scheme, scheme_from_lagrangian, wwj_schedule,
    Schedule,
};
use accelvi::wwj::{run_detailed, solve_subproblem, y_update, WwjParams};
use accelvi_harness::checks::{forced_sweep, gradient_sweep, symplecticity_sweep, SymplecticCase};
use accelvi_harness::config::CheckSettings;
use accelvi_harness::{parse_config, run_experiment, write_csv};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn max_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .flat_map(|(u, v)| u.iter().zip(v).map(|(p, q)| (p - q).abs() / p.abs().max(1.0)))
        .fold(0.0, f64::max)
}

fn random_quadratic(rng: &mut ChaCha8Rng) -> (QuadraticForm<f64>, f64) {
    let n = rng.random_range(1..=5);
    let m = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0f64..1.0));
    let mut a = m.transpose().matmul(&m).unwrap();
    for i in 0..n {
        a[(i, i)] += 0.1;
    }
    let l = (0..n).map(|i| (0..n).map(|j| a[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let center = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    (QuadraticForm::new(a, center).unwrap(), l)
}

fn random_table(rng: &mut ChaCha8Rng, len: usize, l: f64) -> Schedule<f64> {
    Schedule::Table {
        mu: (0..len).map(|_| rng.random_range(0.1..0.99)).collect(),
        eta: (0..len).map(|_| rng.random_range(0.0..1.0 / l)).collect(),
    }
}

fn constant_coefficients() -> Outcome {
    let s = constant_schedule(1.0, 0.1024).map_err(|e| e.to_string())?;
    let (mu, eta) = (s.mu(5), s.eta(5));
    ensure(
        (0.9020..=0.9033).contains(&mu) && (0.00990..=0.00999).contains(&eta),
        format!("mu = {mu:.6}, eta = {eta:.6}"),
    )
}

fn classical_asymptotics() -> Outcome {
    let s = classical_schedule(3, 0.1).map_err(|e| e.to_string())?;
    let k = 10_000usize;
    let gap = (s.mu(k) - k as f64 / (k + 3) as f64).abs();
    ensure(gap < 1e-3, format!("|mu(1e4) - k/(k+3)| = {gap:.3e}"))
}

fn scheme_sequence(f: &QuadraticForm<f64>, s: &Schedule<f64>, x0: &[f64], steps: usize, method: Method) -> Vec<Vec<f64>> {
    let mut st = OptimizerState::new(method, x0.to_vec());
    let mut out = vec![x0.to_vec()];
    for k in 0..steps {
        let (x, y) = match method {
            Method::Nag => nag_step(f, &st, s.mu(k), s.eta(k)).unwrap(),
            _ => cm_step(f, &st, s.mu(k), s.eta(k)).unwrap(),
        };
        st.advance(x.clone(), y);
        out.push(x);
    }
    out
}

fn del_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let (f, l) = random_quadratic(&mut rng);
        let s = random_table(&mut rng, 60, l);
        let c = lagrangian_from_scheme(&s, 59).map_err(|e| e.to_string())?;
        let x0: Vec<f64> = (0..f.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
        for (method, forced) in [(Method::Cm, false), (Method::Nag, true)] {
            let seq = scheme_sequence(&f, &s, &x0, 50, method);
            let mut del = vec![seq[0].clone(), seq[1].clone()];
            for k in 0..49 {
                let z = forced_del_step(&c, &f, &del[k], &del[k + 1], k, forced).map_err(|e| e.to_string())?;
                del.push(z);
            }
            worst = worst.max(max_diff(&seq, &del));
        }
    }
    // decay of the running envelope on the benchmark quadratic
    let q = make_quadratic(0.9, 10).map_err(|e| e.to_string())?;
    let s = classical_schedule(3, 0.1).map_err(|e| e.to_string())?;
    let t = run(&q, Method::Nag, &s, &[1.0; 10], &StopRule::iterations(1600)).map_err(|e| e.to_string())?;
    let f = t.fvals();
    let envelope: Vec<f64> = [50, 100, 200, 400, 800]
        .iter()
        .map(|&k| f[k..=2 * k].iter().cloned().fold(0.0, f64::max))
        .collect();
    let decays = envelope.windows(2).all(|w| w[1] < w[0]);
    let envelope = envelope.iter().map(|e| format!("{e:.1e}")).collect::<Vec<_>>().join(" > ");
    ensure(
        worst <= 1e-12 && decays,
        format!("max deviation {worst:.2e} over 20 quadratics; envelope {envelope}"),
    )
}

fn nag_rewrites() -> Outcome {
    let f = make_quadratic(0.9, 10).map_err(|e| e.to_string())?;
    let s = classical_schedule(3, 0.1).map_err(|e| e.to_string())?;
    let x0 = vec![1.0; 10];
    let mut st = OptimizerState::new(Method::Nag, x0.clone());
    let (mut xs, mut ys) = (vec![x0.clone()], vec![x0.clone()]);
    for k in 0..50 {
        let (x, y) = nag_step(&f, &st, s.mu(k), s.eta(k)).map_err(|e| e.to_string())?;
        st.advance(x.clone(), y.clone());
        xs.push(x);
        ys.push(y);
    }
    let dx = max_diff(&xs, &nag_x_recursion(&f, &s, &x0, 50).map_err(|e| e.to_string())?);
    let dy = max_diff(&ys, &nag_y_recursion(&f, &s, &x0, 50).map_err(|e| e.to_string())?);
    ensure(dx <= 1e-12 && dy <= 1e-12, format!("x form {dx:.2e}, y form {dy:.2e}"))
}

fn symplecticity() -> Outcome {
    let h = 0.05;
    let families = [
        classical_schedule(3, h),
        wwj_schedule(4, 0.5, h),
        bjw_schedule(3, 1.0, h),
        constant_schedule(1.0, h),
    ]
    .into_iter()
    .collect::<accelvi::Result<Vec<_>>>()
    .map_err(|e| e.to_string())?;
    let objectives: Vec<Box<dyn Objective<f64>>> = vec![
        Box::new(make_quadratic(0.9, 4).map_err(|e| e.to_string())?),
        Box::new(make_rosenbrock(3).map_err(|e| e.to_string())?),
        Box::new(make_yatf()),
        Box::new(make_logreg(Dataset::synthetic_preset()).map_err(|e| e.to_string())?),
    ];
    let mut cases = Vec::new();
    for obj in &objectives {
        for s in &families {
            cases.push(SymplecticCase {
                label: format!("{}/{}", obj.name(), s.name()),
                schedule: s.clone(),
                objective: obj.as_ref(),
            });
        }
    }
    let settings = CheckSettings {
        points: 200,
        fd_step: 1e-5,
        ..CheckSettings::default()
    };
    let results = symplecticity_sweep(&cases, &settings).map_err(|e| e.to_string())?;
    let worst = results.iter().max_by(|a, b| a.max_defect.total_cmp(&b.max_defect)).unwrap();
    let forced = forced_sweep(&cases[..1], &settings).map_err(|e| e.to_string())?;
    let control = forced[0].max_defect;
    ensure(
        worst.max_defect <= 1e-5 && control > 1e-3,
        format!(
            "{} cases, max defect {:.2e} ({}), forced control {control:.2e}",
            cases.len(),
            worst.max_defect,
            worst.label
        ),
    )
}

fn gradients() -> Outcome {
    let objectives: Vec<Box<dyn Objective<f64>>> = vec![
        Box::new(make_quadratic(0.9, 4).map_err(|e| e.to_string())?),
        Box::new(make_rosenbrock(4).map_err(|e| e.to_string())?),
        Box::new(make_yatf()),
        Box::new(make_logreg(Dataset::synthetic_preset()).map_err(|e| e.to_string())?),
    ];
    let mut parts = Vec::new();
    let mut ok = true;
    for (i, obj) in objectives.iter().enumerate() {
        let s = gradient_sweep(obj.as_ref(), 100, 2.0, i as u64).map_err(|e| e.to_string())?;
        ok &= s.max_error <= 1e-5;
        parts.push(format!("{} {:.1e}", obj.name(), s.max_error));
    }
    ensure(ok, parts.join(", "))
}

fn oscillation() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/yatf_oscillation.toml");
    let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
    let cfg = parse_config(&text).map_err(|e| e.to_string())?;
    let rec = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let count = |label: &str| -> Result<(usize, bool), String> {
        let r = rec.run(label).ok_or_else(|| format!("no method labelled {label}"))?;
        let t = r.trajectory().ok_or_else(|| format!("{label} failed"))?;
        Ok((r.oscillations().unwrap(), !t.diverged() && t.records.len() == cfg.iterations + 1))
    };
    let (cm, cm_ok) = count("cm-classical3")?;
    let (nag, nag_ok) = count("nag-classical3")?;
    ensure(
        cm_ok && nag_ok && nag <= cm,
        format!("{} iterations, local maxima nag {nag} vs cm {cm}", cfg.iterations),
    )
}

fn wwj_consistency() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let (f, _) = random_quadratic(&mut rng);
        let x: Vec<f64> = (0..f.dim()).map(|_| rng.random_range(-2.0..2.0)).collect();
        let params = WwjParams::new(2, 0.5, rng.random_range(0.5..4.0), rng.random_range(0.01..0.5))
            .map_err(|e| e.to_string())?;
        let closed = y_update(&f, &params, &x, 1).map_err(|e| e.to_string())?;
        let hess = f.hessian(&x);
        let sol = solve_subproblem(&f.gradient(&x), hess.as_ref(), &params, 1).map_err(|e| e.to_string())?;
        let newton: Vec<f64> = x.iter().zip(&sol.d).map(|(a, b)| a + b).collect();
        worst = worst.max(max_diff(&[closed], &[newton]));
    }
    let q = make_quadratic(0.9, 1).map_err(|e| e.to_string())?;
    let params = WwjParams::new(3, 0.25, 4.0, 0.1).map_err(|e| e.to_string())?;
    let (t, residuals) = run_detailed(&q, &params, &[1.0], &StopRule::iterations(1000)).map_err(|e| e.to_string())?;
    let inner = residuals.iter().cloned().fold(0.0, f64::max);
    ensure(
        worst <= 1e-12 && inner <= 1e-10 && residuals.len() == 1000 && !t.diverged(),
        format!("p=2 closed form vs Newton {worst:.2e}; p=3 max inner residual {inner:.2e} over {} steps", residuals.len()),
    )
}

fn determinism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let s = random_table(&mut rng, 41, 1.0);
        let back = scheme_from_lagrangian(&lagrangian_from_scheme(&s, 40).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        for k in 1..=40 {
            worst = worst.max((s.mu(k) - back.mu(k)).abs()).max((s.eta(k) - back.eta(k)).abs());
        }
        let c = lagrangian_from_scheme(&s, 40).map_err(|e| e.to_string())?;
        let c2 = lagrangian_from_scheme(&back, 40).map_err(|e| e.to_string())?;
        for (u, v) in c.a_seq().iter().zip(c2.a_seq()) {
            worst = worst.max((u - v).abs() / u.abs().max(1.0));
        }
    }
    let text = r#"
iterations = 300
h = 0.1
record_stride = 7
[objective]
name = "rosenbrock"
n = 3
[[methods]]
method = "cm"
schedule = "classical"
n = 3
[[methods]]
method = "nag"
schedule = "constant"
lambda = 1.0
[[methods]]
method = "wwj"
p = 2
d = 0.5
n_weight = 10.0
h = 0.02
"#;
    let dirs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    let mut outputs = Vec::new();
    for dir in &dirs {
        let cfg = parse_config(text).map_err(|e| e.to_string())?;
        let rec = run_experiment(&cfg).map_err(|e| e.to_string())?;
        let files = write_csv(&rec, dir.path()).map_err(|e| e.to_string())?;
        let mut csvs = Vec::new();
        for f in files.iter().filter(|f| f.extension().is_some_and(|e| e == "csv")) {
            csvs.push((f.file_name().unwrap().to_owned(), std::fs::read(f).map_err(|e| e.to_string())?));
        }
        outputs.push(csvs);
    }
    let identical = outputs[0].len() == 3 && outputs[0] == outputs[1];
    ensure(
        worst <= 1e-12 && identical,
        format!("round trip {worst:.2e}; {} CSVs byte-identical: {identical}", outputs[0].len()),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("constant schedule coefficients", constant_coefficients),
        ("classical momentum asymptotics", classical_asymptotics),
        ("schemes solve the discrete Euler-Lagrange equations", del_equivalence),
        ("rewritten Nesterov recursions", nag_rewrites),
        ("symplecticity of the discrete Hamiltonian map", symplecticity),
        ("analytic gradients", gradients),
        ("Nesterov oscillates less than classical momentum", oscillation),
        ("WWJ inner solves", wwj_consistency),
        ("round trips and reproducible output", determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failures += 1;
                ("FAIL", d)
            }
        };
        println!("{tag} criterion {}: {name}: {detail} [{secs:.2} s]", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
