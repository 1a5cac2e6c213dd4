use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn heatindex(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_heatindex"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn run_config(text: &str) -> (TempDir, Output) {
    let dir = TempDir::new().unwrap();
    fs::write(dir.path().join("run.toml"), text).unwrap();
    let out = heatindex(&["run", "--config", "run.toml", "--out", "out"], dir.path());
    (dir, out)
}

fn report(dir: &TempDir) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.path().join("out/report.json")).unwrap()).unwrap()
}

#[test]
fn list_suites() {
    let dir = TempDir::new().unwrap();
    let out = heatindex(&["list-suites"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "mckean-singer",
        "mehler",
        "rescale",
        "jlo-limit",
        "k-pairing",
        "charclass",
        "all",
    ] {
        assert!(text.contains(name), "{name} missing from {text}");
    }
}

#[test]
fn usage_errors_exit_2() {
    let (_dir, out) = run_config("");
    assert_eq!(out.status.code(), Some(2));
    let (_dir, out) = run_config("[run]\nsuite = \"mehler\"\n[tolerances]\nmehler = -1.0\n");
    assert_eq!(out.status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    assert_eq!(
        heatindex(&["run", "--config", "missing.toml"], dir.path())
            .status
            .code(),
        Some(2)
    );
    fs::write(dir.path().join("run.toml"), "[run]\nsuite = \"mehler\"\n").unwrap();
    assert_eq!(
        heatindex(
            &["run", "--config", "run.toml", "--suite", "bogus"],
            dir.path()
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        heatindex(&["frobnicate"], dir.path()).status.code(),
        Some(2)
    );
    let out = Command::new(env!("CARGO_BIN_EXE_heatindex"))
        .args(["run", "--config", "run.toml"])
        .env("HEATINDEX_THREADS", "many")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn mckean_singer_suite_passes() {
    let (dir, out) = run_config("[run]\nsuite = \"mckean-singer\"\n");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let r = report(&dir);
    assert_eq!(r["pass"], Value::Bool(true));
    let checks = r["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 21);
    for c in checks {
        assert!(c["abs_err"].as_f64().unwrap() <= 1e-8);
        assert!(c["tail_bound"].as_f64().is_some());
    }
    let csv = fs::read_to_string(dir.path().join("out/mckean_singer.csv")).unwrap();
    assert!(csv.starts_with("model,charge,t,supertrace,tail_bound"));
    assert_eq!(csv.lines().count(), 22);
}

#[test]
fn jlo_limit_suite_reports_limit() {
    let (dir, out) = run_config("[run]\nsuite = \"jlo-limit\"\n");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let r = report(&dir);
    let limit = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| {
            c["name"]
                .as_str()
                .unwrap()
                .contains("small-t limit (imaginary")
        })
        .unwrap();
    assert!((limit["rhs"].as_f64().unwrap() + std::f64::consts::FRAC_PI_4).abs() < 1e-10);
    assert!(limit["rel_err"].as_f64().unwrap() <= 0.01);
    assert!(dir.path().join("out/jlo_limit.csv").exists());
    assert!(dir.path().join("out/conjugation_expansion.csv").exists());
}

#[test]
fn failing_check_exits_1_with_report() {
    let (dir, out) =
        run_config("[run]\nsuite = \"jlo-limit\"\n[tolerances]\njlo_relative = 1e-9\n");
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(report(&dir)["pass"], Value::Bool(false));
}

#[test]
fn window_violation_is_reported() {
    let (dir, out) =
        run_config("[run]\nsuite = \"jlo-limit\"\n[sweeps]\njlo_times = [0.002, 0.001, 0.0005]\n");
    assert_eq!(out.status.code(), Some(1));
    let r = report(&dir);
    let errors = r["errors"].as_array().unwrap();
    assert!(
        errors
            .iter()
            .any(|e| e.as_str().unwrap().contains("window")),
        "{errors:?}"
    );
}

#[test]
fn reruns_are_byte_identical() {
    let config = "[run]\nsuite = \"rescale\"\n";
    let (a, out_a) = run_config(config);
    let (b, out_b) = run_config(config);
    assert_eq!(out_a.status.code(), Some(0));
    assert_eq!(out_b.status.code(), Some(0));
    for name in ["rescale_f0.csv", "rescale_f1.csv"] {
        let x = fs::read(a.path().join("out").join(name)).unwrap();
        let y = fs::read(b.path().join("out").join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timestamp");
        v
    };
    assert_eq!(strip(report(&a)), strip(report(&b)));
}

#[test]
fn thread_count_does_not_change_results() {
    let dir = TempDir::new().unwrap();
    fs::write(
        dir.path().join("run.toml"),
        "[run]\nsuite = \"jlo-limit\"\n",
    )
    .unwrap();
    for (threads, out) in [("1", "one"), ("4", "four")] {
        let status = Command::new(env!("CARGO_BIN_EXE_heatindex"))
            .args(["run", "--config", "run.toml", "--out", out])
            .env("HEATINDEX_THREADS", threads)
            .current_dir(dir.path())
            .output()
            .unwrap()
            .status;
        assert_eq!(status.code(), Some(0));
    }
    let one = fs::read(dir.path().join("one/jlo_limit.csv")).unwrap();
    let four = fs::read(dir.path().join("four/jlo_limit.csv")).unwrap();
    assert_eq!(one, four);
}

#[test]
fn small_k_pairing_run() {
    let config = "[run]\nsuite = \"k-pairing\"\n[models]\npairing_cutoffs = [6, 8]\nbott_grid = 64\n[sweeps]\npairing_time = 0.0025\n";
    let (dir, out) = run_config(config);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let csv = fs::read_to_string(dir.path().join("out/spectral_index.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn charclass_suite_passes() {
    let (dir, out) = run_config("[run]\nsuite = \"charclass\"\n");
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(dir.path().join("out/bott_ch_de_rham.csv").exists());
}
