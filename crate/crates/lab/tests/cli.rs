use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn lowmach(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowmach")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, json).unwrap();
    p
}

fn small_sweep(eps: &str) -> String {
    format!(
        r#"{{"scenario": "periodic-limit", "grid": {{"dim": 2, "points": 16}},
            "fluid": {{"a": 1.0, "gamma": 2.0, "mu": 0.05, "lam": 0.0, "nu": 0.05}},
            "eps_list": {eps}, "t_final": 0.2, "outputs": 4, "seed": 7,
            "profile": {{"name": "random-band-limited"}}}}"#
    )
}

#[test]
fn check_passes() {
    let tmp = TempDir::new().unwrap();
    let o = lowmach(&["check", "--out", "out"], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert!(tmp.path().join("out/summary.json").exists());
}

#[test]
fn bad_configs_exit_2() {
    let tmp = TempDir::new().unwrap();
    let up = write_config(tmp.path(), "up.json", &small_sweep("[0.05, 0.1, 0.2]"));
    let o = lowmach(&["run", up.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("configuration"));

    let two = write_config(tmp.path(), "two.json", &small_sweep("[0.2, 0.1]"));
    assert_eq!(code(&lowmach(&["sweep", two.to_str().unwrap()], tmp.path())), 2);

    let unknown = write_config(tmp.path(), "unknown.json", r#"{"scenario": "periodic-limit", "eps": [0.1]}"#);
    assert_eq!(code(&lowmach(&["run", unknown.to_str().unwrap()], tmp.path())), 2);
    assert_eq!(code(&lowmach(&["run", "missing.json"], tmp.path())), 2);
}

#[test]
fn sweeps_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "sweep.json", &small_sweep("[0.2, 0.1, 0.05]"));
    let cfg = cfg.to_str().unwrap();
    let a = lowmach(&["sweep", cfg, "--out", "a", "--workers", "1"], tmp.path());
    let b = lowmach(&["sweep", cfg, "--out", "b", "--workers", "3"], tmp.path());
    assert!(a.status.success() && b.status.success(), "{}", String::from_utf8_lossy(&a.stdout));
    let mut names: Vec<_> = fs::read_dir(tmp.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.len() >= 5);
    for n in names {
        let x = fs::read(tmp.path().join("a").join(&n)).unwrap();
        let y = fs::read(tmp.path().join("b").join(&n)).unwrap();
        assert!(x == y, "{n:?} differs");
    }

    let c = lowmach(&["sweep", cfg, "--out", "c", "--seed", "8"], tmp.path());
    assert!(c.status.success());
    let m = |d: &str| fs::read(tmp.path().join(d).join("metrics.csv")).unwrap();
    assert_ne!(m("a"), m("c"));
}

#[test]
fn single_eps_run() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(
        tmp.path(),
        "one.json",
        r#"{"scenario": "periodic-limit", "grid": {"dim": 2, "points": 64},
            "fluid": {"a": 1.0, "gamma": 2.0, "mu": 0.05, "lam": 0.0, "nu": 0.05},
            "eps_list": [0.1], "t_final": 0.1, "outputs": 2, "out_dir": "res"}"#,
    );
    let o = lowmach(&["run", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let metrics = fs::read_to_string(tmp.path().join("res/metrics.csv")).unwrap();
    assert_eq!(metrics.lines().count(), 2);
    assert!(metrics.starts_with("eps,pu_error"));
    let series = fs::read_to_string(tmp.path().join("res/diagnostics_eps0.csv")).unwrap();
    assert_eq!(series.lines().count(), 4);
}

#[test]
fn modes_catalog_and_strict_verdict() {
    let tmp = TempDir::new().unwrap();
    let o = lowmach(&["modes", "interval", "--cutoff", "4", "--out", "m"], tmp.path());
    assert_eq!(code(&o), 0);
    let csv = fs::read_to_string(tmp.path().join("m/modes_interval.csv")).unwrap();
    assert_eq!(csv.lines().count(), 5);
    assert!(String::from_utf8_lossy(&o.stdout).contains("violated by 1 2 3 4"));
    assert_eq!(code(&lowmach(&["modes", "interval", "--out", "m", "--strict"], tmp.path())), 1);

    let rect = lowmach(&["modes", "rectangle", "--cutoff", "3", "--out", "m", "--strict"], tmp.path());
    assert_eq!(code(&rect), 0, "{}", String::from_utf8_lossy(&rect.stdout));
    assert!(tmp.path().join("m/modes_rectangle.csv").exists());
    assert_eq!(code(&lowmach(&["modes", "torus"], tmp.path())), 2);
}
