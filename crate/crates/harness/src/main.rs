use std::path::{Path, PathBuf};
use std::process::ExitCode;

use accelvi::objectives::finite_difference_gradient;
use accelvi_harness::checks::{forced_sweep, gradient_sweep, symplecticity_sweep, SymplecticCase, GRADIENT_FD_STEP};
use accelvi_harness::config::{DatasetSource, MethodSpec, ObjectiveSpec, OBJECTIVES};
use accelvi_harness::output::format_number;
use accelvi_harness::{
    parse_config, render_plot, run_experiment, write_csv, ExperimentConfig, HarnessError, PlotKind, RunRecord,
    OUTPUT_DIR_ENV,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Momentum methods as discrete variational integrators: experiments and
/// geometric checks.
#[derive(Parser, Debug)]
#[command(name = "accelvi", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run every method in a config and write one CSV per method
    Run(RunArgs),
    /// Like `run`, but always plot and report oscillation counts
    Compare(RunArgs),
    /// Numerical checks
    #[command(subcommand)]
    Check(CheckCommand),
    /// List available objectives or schedule families
    List {
        #[arg(value_enum)]
        what: ListKind,
    },
}

#[derive(Args, Debug)]
struct RunArgs {
    config: PathBuf,
    /// Output directory; beats both the config and ACCELVI_OUTPUT_DIR
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum CheckCommand {
    /// Compare analytic gradients with central differences
    Gradient(GradientArgs),
    /// Symplecticity defect of the discrete Hamiltonian map at random points
    Symplecticity { config: PathBuf },
}

#[derive(Args, Debug)]
struct GradientArgs {
    #[arg(value_parser = clap::builder::PossibleValuesParser::new(OBJECTIVES))]
    objective: String,
    /// Check a single point, e.g. --point=-1,0.5
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    point: Option<Vec<f64>>,
    /// Quadratic correlation parameter
    #[arg(long, default_value_t = 0.9)]
    rho: f64,
    /// Dimension for quadratic and rosenbrock
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Dataset CSV (header x,y) for logreg
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Number of random points when --point is absent
    #[arg(long, default_value_t = 100)]
    points: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-5)]
    tolerance: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ListKind {
    Objectives,
    Schedules,
}

fn load_config(path: &Path) -> Result<ExperimentConfig, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    let mut cfg = parse_config(&text)?;
    // dataset paths are relative to the config file
    if let ObjectiveSpec::Logreg {
        dataset: DatasetSource::Csv(p),
    } = &mut cfg.objective
    {
        if p.is_relative() {
            if let Some(dir) = path.parent() {
                *p = dir.join(&*p);
            }
        }
    }
    Ok(cfg)
}

fn warn_slow_methods(cfg: &ExperimentConfig) {
    for m in &cfg.methods {
        if let MethodSpec::Wwj { p: 3, .. } = m.spec {
            eprintln!(
                "warning: `{}` uses wwj with p = 3; every step solves an inner Newton problem and is much slower than p = 2",
                m.label
            );
        }
    }
}

fn print_summary(rec: &RunRecord) {
    println!(
        "{:<16} {:<6} {:>8} {:>24} {:>24} {:>10} {:>6}  status",
        "label", "method", "k", "f", "gradnorm", "seconds", "osc"
    );
    for run in &rec.runs {
        match &run.outcome {
            Ok(t) => {
                let last = t.last();
                let status = if t.diverged() {
                    "diverged".to_string()
                } else {
                    format!("{:?}", t.stop_reason)
                };
                println!(
                    "{:<16} {:<6} {:>8} {:>24} {:>24} {:>10.4} {:>6}  {status}",
                    run.label,
                    run.method,
                    last.k,
                    format_number(last.f),
                    format_number(last.grad_norm),
                    run.wall_time,
                    run.oscillations().unwrap_or(0),
                );
            }
            Err(e) => println!("{:<16} {:<6} {:>8} {:>24} {:>24} {:>10.4} {:>6}  error: {e}", run.label, run.method, "-", "-", "-", run.wall_time, "-"),
        }
    }
}

fn run_command(args: &RunArgs, compare: bool) -> Result<bool, HarnessError> {
    let mut cfg = load_config(&args.config)?;
    if let Some(dir) = args.output_dir.clone().or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from)) {
        cfg.output_dir = dir;
    }
    warn_slow_methods(&cfg);
    let rec = run_experiment(&cfg)?;
    let files = write_csv(&rec, &cfg.output_dir)?;
    print_summary(&rec);
    for f in &files {
        println!("wrote {}", f.display());
    }
    if compare || cfg.plot == accelvi_harness::config::PlotMode::Svg {
        let mut kinds = vec![PlotKind::FvalsLoglog];
        if rec.dim() == 2 {
            kinds.push(PlotKind::Trajectory2d);
        }
        for kind in kinds {
            let out = render_plot(&rec, kind, &cfg.output_dir.join(format!("{}.svg", kind.name())))?;
            println!("wrote {}", out.path.display());
        }
    }
    if compare {
        let mut ranked: Vec<_> = rec.runs.iter().filter_map(|r| r.trajectory().map(|t| (r, t.last().f))).collect();
        ranked.sort_by(|a, b| a.1.total_cmp(&b.1));
        println!("ranking by final f:");
        for (i, (r, f)) in ranked.iter().enumerate() {
            println!("  {}. {} f = {} local maxima = {}", i + 1, r.label, format_number(*f), r.oscillations().unwrap_or(0));
        }
    }
    Ok(rec.success())
}

fn gradient_command(args: &GradientArgs) -> Result<bool, HarnessError> {
    let spec = match args.objective.as_str() {
        "quadratic" => ObjectiveSpec::Quadratic { rho: args.rho, n: args.n },
        "rosenbrock" => ObjectiveSpec::Rosenbrock { n: args.n },
        "yatf" => ObjectiveSpec::Yatf,
        _ => ObjectiveSpec::Logreg {
            dataset: args.dataset.clone().map_or(DatasetSource::Synthetic, DatasetSource::Csv),
        },
    };
    let obj = spec.build()?;
    match &args.point {
        Some(x) => {
            if x.len() != obj.dim() {
                return Err(accelvi::Error::DimensionMismatch {
                    expected: obj.dim(),
                    got: x.len(),
                }
                .into());
            }
            let g = obj.gradient(x);
            let fd = finite_difference_gradient(obj.as_ref(), x, GRADIENT_FD_STEP);
            let err = accelvi::objectives::check_gradient(obj.as_ref(), x, GRADIENT_FD_STEP)?;
            println!("{:>4} {:>24} {:>24}", "i", "analytic", "central difference");
            for i in 0..g.len() {
                println!("{:>4} {:>24} {:>24}", i + 1, format_number(g[i]), format_number(fd[i]));
            }
            println!("relative error {}", format_number(err));
            let ok = err <= args.tolerance;
            println!("{}", if ok { "PASS" } else { "FAIL" });
            Ok(ok)
        }
        None => {
            let s = gradient_sweep(obj.as_ref(), args.points, 2.0, args.seed)?;
            let ok = s.max_error <= args.tolerance;
            println!(
                "{}: {} points in [-2, 2]^{}, max relative error {} at {:?}: {}",
                obj.name(),
                s.points,
                obj.dim(),
                format_number(s.max_error),
                s.worst_point,
                if ok { "PASS" } else { "FAIL" }
            );
            Ok(ok)
        }
    }
}

fn symplecticity_command(path: &Path) -> Result<bool, HarnessError> {
    let cfg = load_config(path)?;
    let obj = cfg.objective.build()?;
    let mut cases = Vec::new();
    for m in &cfg.methods {
        match &m.spec {
            MethodSpec::Momentum { schedule, .. } => cases.push(SymplecticCase {
                label: m.label.clone(),
                schedule: schedule.build(m.spec.step(cfg.h))?,
                objective: obj.as_ref(),
            }),
            MethodSpec::Wwj { .. } => println!("{}: skipped, wwj is not a one-step Lagrangian map", m.label),
        }
    }
    let settings = cfg.check;
    let results = symplecticity_sweep(&cases, &settings)?;
    let forced = forced_sweep(&cases, &settings)?;
    println!(
        "objective {} · {} points · fd_step {} · k in [1, {})",
        obj.name(),
        settings.points,
        settings.fd_step,
        settings.k_max
    );
    println!("{:<16} {:>8} {:>24} {:>6} {:>24}  status", "label", "samples", "max defect", "k", "forced control");
    let mut ok = true;
    for (r, f) in results.iter().zip(&forced) {
        let pass = r.max_defect <= settings.tolerance;
        ok &= pass;
        println!(
            "{:<16} {:>8} {:>24} {:>6} {:>24}  {}",
            r.label,
            r.samples,
            format_number(r.max_defect),
            r.worst_k,
            format_number(f.max_defect),
            if pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(ok)
}

fn list(what: ListKind) {
    match what {
        ListKind::Objectives => {
            println!("quadratic   rho, n      ½xᵀΣ⁻¹x with the tridiagonal inverse of Σ_ij = rho^|i−j|");
            println!("rosenbrock  n           Σ 100(x_{{i+1}} − x_i²)² + (1 − x_i)²");
            println!("yatf                    sin(2x² − y² + 3)·cos(x + 1 − e^{{2y}})");
            println!("logreg      dataset     mean squared error of a logistic model; \"synthetic\" or a CSV path");
        }
        ListKind::Schedules => {
            println!("classical   n           μ from the ratio of powers of k, η ∝ h²");
            println!("wwj         n, d        polynomial schedule with η ∝ d·t^(n−3)·h²");
            println!("bjw         n, d        midpoint variant, first usable step k = 1");
            println!("constant    lambda      exponential weights: constant μ and η");
            println!("methods: gd, cm, nag take a schedule; wwj takes p (2 or 3), d and n_weight");
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run(args) => run_command(args, false),
        Command::Compare(args) => run_command(args, true),
        Command::Check(CheckCommand::Gradient(args)) => gradient_command(args),
        Command::Check(CheckCommand::Symplecticity { config }) => symplecticity_command(config),
        Command::List { what } => {
            list(*what);
            Ok(true)
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
