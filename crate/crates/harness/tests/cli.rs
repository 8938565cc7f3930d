use std::path::Path;
use std::process::{Command, Output};

fn accelvi(args: &[&str], env: Option<(&str, &Path)>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_accelvi"));
    cmd.args(args).env_remove(accelvi_harness::OUTPUT_DIR_ENV);
    if let Some((k, v)) = env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

const SMALL: &str = r#"
iterations = 30
h = 0.1
output_dir = "from-config"
[objective]
name = "quadratic"
rho = 0.5
n = 2
[[methods]]
method = "nag"
schedule = "classical"
n = 3
"#;

#[test]
fn run_writes_to_the_requested_directory() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let out_dir = dir.path().join("flag");
    let out = accelvi(&["run", &cfg, "--output-dir", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("nag.csv").exists());
    assert!(out_dir.join("manifest.txt").exists());
}

#[test]
fn environment_overrides_the_config_but_not_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let env_dir = dir.path().join("env");
    let out = accelvi(&["run", &cfg], Some((accelvi_harness::OUTPUT_DIR_ENV, &env_dir)));
    assert_eq!(out.status.code(), Some(0));
    assert!(env_dir.join("nag.csv").exists());

    let flag_dir = dir.path().join("flag");
    let other = dir.path().join("unused");
    let out = accelvi(
        &["run", &cfg, "--output-dir", flag_dir.to_str().unwrap()],
        Some((accelvi_harness::OUTPUT_DIR_ENV, &other)),
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_dir.join("nag.csv").exists());
    assert!(!other.exists());
}

#[test]
fn compare_plots_and_ranks() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "small.toml", SMALL);
    let out_dir = dir.path().join("out");
    let out = accelvi(&["compare", &cfg, "--output-dir", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0));
    assert!(out_dir.join("fvals_loglog.svg").exists());
    assert!(out_dir.join("trajectory_2d.svg").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("ranking by final f"));
}

#[test]
fn divergence_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "big_step.toml", &SMALL.replace("h = 0.1", "h = 5.0"));
    let out_dir = dir.path().join("out");
    let out = accelvi(&["run", &cfg, "--output-dir", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("diverged"));
}

#[test]
fn bad_configs_exit_with_two_and_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "bad.toml",
        "iterations = \"many\"\nh = 0.1\n[objective]\nname = \"banana\"\n[[methods]]\nmethod = \"nag\"\nschedule = \"classical\"\nn = 3\nspeed = 2\n",
    );
    let out = accelvi(&["run", &cfg], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 1"), "{err}");
    assert!(err.contains("line 4"), "{err}");
    assert!(err.contains("line 9"), "{err}");

    let out = accelvi(&["run", "/nonexistent/config.toml"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gradient_checks_pass() {
    for obj in ["quadratic", "rosenbrock", "yatf", "logreg"] {
        let out = accelvi(&["check", "gradient", obj, "--points", "20"], None);
        assert_eq!(out.status.code(), Some(0), "{obj}");
        assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
    }
    let out = accelvi(&["check", "gradient", "yatf", "--point=-1,0.5"], None);
    assert_eq!(out.status.code(), Some(0));
    let out = accelvi(&["check", "gradient", "yatf", "--point=1,2,3"], None);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn symplecticity_preset_passes() {
    let cfg = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/symplecticity.toml");
    let out = accelvi(&["check", "symplecticity", cfg], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(String::from_utf8_lossy(&out.stdout).matches("PASS").count(), 4);
}

#[test]
fn lists_name_every_choice() {
    let out = String::from_utf8(accelvi(&["list", "objectives"], None).stdout).unwrap();
    for name in accelvi_harness::config::OBJECTIVES {
        assert!(out.contains(name));
    }
    let out = String::from_utf8(accelvi(&["list", "schedules"], None).stdout).unwrap();
    for name in accelvi_harness::config::SCHEDULES {
        assert!(out.contains(name));
    }
}
