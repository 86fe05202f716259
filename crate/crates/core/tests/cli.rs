//! End-to-end tests of the `hyperac` binary.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn hyperac(args: &[&str]) -> i32 {
    Command::new(env!("CARGO_BIN_EXE_hyperac"))
        .args(args)
        .output()
        .expect("binary runs")
        .status
        .code()
        .expect("exit code")
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("config.toml");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn summary(out: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn tree(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for e in fs::read_dir(&d).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                let rel = p.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
                out.insert(rel, fs::read(&p).unwrap());
            }
        }
    }
    out
}

const SMALL_PDE: &str = "eps = 0.08\nt_end = 0.02\nhorizon = 0.02\nt1 = 0.005\nsnapshot_times = [0.0, 0.01, 0.02]\n";

#[test]
fn ode_run_declares_parseable_files() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "mode = \"ode\"\neta = 1e-4\nn = 2\nrho0 = 0.6\nnu0 = 0.0\n");
    let out = tmp.path().join("out");
    assert_eq!(hyperac(&["run-ode", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    let s = summary(&out);
    assert_eq!(s["experiment"], "ode");
    assert!(s["results"]["t_extinction"].as_f64().unwrap() > 0.18);
    for f in s["files"].as_array().unwrap() {
        let path = out.join(f.as_str().unwrap());
        assert!(path.exists(), "{path:?}");
        if path.extension().is_some_and(|e| e == "csv") {
            let mut r = csv::Reader::from_path(&path).unwrap();
            let width = r.headers().unwrap().len();
            for rec in r.records() {
                assert_eq!(rec.unwrap().len(), width);
            }
        }
    }
    for c in s["checks"].as_array().unwrap() {
        assert!(c["name"].is_string() && c["pass"].is_boolean());
    }
}

#[test]
fn pde_outputs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_PDE);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(hyperac(&["run-pde", "--config", &cfg, "--out", a.to_str().unwrap()]), 0);
    assert_eq!(hyperac(&["run-pde", "--config", &cfg, "--out", b.to_str().unwrap()]), 0);
    let (ta, tb) = (tree(&a), tree(&b));
    assert!(ta.keys().filter(|k| k.starts_with("snapshots")).count() == 3);
    assert_eq!(ta, tb);
}

#[test]
fn sweep_is_deterministic_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        "t_end = 0.02\nhorizon = 0.02\nt1 = 0.005\neps_list = [0.08, 0.06]\neta_list = [1e-2, 1e-3]\n",
    );
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert_eq!(hyperac(&["sweep", "--config", &cfg, "--out", a.to_str().unwrap(), "--workers", "1"]), 0);
    assert_eq!(hyperac(&["sweep", "--config", &cfg, "--out", b.to_str().unwrap(), "--workers", "2"]), 0);
    assert_eq!(tree(&a), tree(&b));
    assert!(a.join("sweep.csv").exists() && a.join("ode_convergence.csv").exists());
}

#[test]
fn empty_snapshot_list_writes_series_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "eps = 0.08\nt_end = 0.01\nhorizon = 0.01\nt1 = 0.0\n");
    let out = tmp.path().join("out");
    assert_eq!(hyperac(&["run-pde", "--config", &cfg, "--out", out.to_str().unwrap()]), 0);
    assert!(out.join("series.csv").exists());
    assert!(!out.join("snapshots").exists());
}

#[test]
fn slow_timescale_relabels_t_column() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_PDE);
    let out = tmp.path().join("out");
    let code = hyperac(&["run-pde", "--config", &cfg, "--out", out.to_str().unwrap(), "--timescale", "slow"]);
    assert_eq!(code, 0);
    let mut r = csv::Reader::from_path(out.join("series.csv")).unwrap();
    let last = r.records().last().unwrap().unwrap();
    let t: f64 = last[0].parse().unwrap();
    let fast: f64 = last[1].parse().unwrap();
    let slow: f64 = last[2].parse().unwrap();
    assert!((fast - 0.02).abs() < 1e-15);
    assert!((t - slow).abs() < 1e-12 && (slow - 0.02 / 0.0064).abs() < 1e-9);
}

#[test]
fn failing_invariant_exits_one_and_names_it() {
    let tmp = tempfile::tempdir().unwrap();
    // Far from the singular limit the convergence order is not yet first order.
    let cfg = write_config(tmp.path(), "eta_list = [0.5, 0.05]\n");
    let out = tmp.path().join("out");
    assert_eq!(hyperac(&["sweep", "--config", &cfg, "--out", out.to_str().unwrap()]), 1);
    let s = summary(&out);
    let failed: Vec<&str> = s["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["pass"] == false)
        .map(|c| c["name"].as_str().unwrap())
        .collect();
    assert!(failed.contains(&"ode_first_order_rate"), "{failed:?}");
}

#[test]
fn invalid_inputs_exit_three() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "eps_list = [0.04]\n");
    let out = tmp.path().join("out");
    assert_eq!(hyperac(&["compare", "--config", &cfg, "--out", out.to_str().unwrap()]), 3);
    let bad = write_config(tmp.path(), "mode = \"ode\"\n");
    assert_eq!(hyperac(&["run-pde", "--config", &bad, "--out", out.to_str().unwrap()]), 3);
    assert_eq!(hyperac(&["run-ode", "--config", "/nonexistent.toml", "--out", out.to_str().unwrap()]), 3);
    assert_ne!(hyperac(&["run-ode", "--timescale", "medium"]), 0);
}

#[test]
fn check_suite_passes_with_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    assert_eq!(hyperac(&["check", "--out", out.to_str().unwrap()]), 0);
    let s = summary(&out);
    assert_eq!(s["experiment"], "check");
    assert!(s["checks"].as_array().unwrap().len() > 15);
    assert!(out.join("checks.csv").exists());
}

#[test]
fn shipped_configs_load() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        hyperac::experiment::ExperimentConfig::from_path(&p)
            .unwrap_or_else(|err| panic!("{p:?}: {err}"));
        seen += 1;
    }
    assert!(seen >= 5);
}
