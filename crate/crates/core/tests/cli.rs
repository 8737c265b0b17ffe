use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mbcl(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbcl")).args(args).arg("--out-dir").arg(out).output().unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(str::to_string).collect())
        .collect()
}

#[test]
fn zero_time_keeps_initial_density() {
    let dir = tempfile::tempdir().unwrap();
    let out = mbcl(&["simulate", "--n", "6", "--c", "2/3", "--t-final", "0"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = rows(&dir.path().join("density.dat"));
    assert_eq!(rows.len(), 701);
    assert!(rows.iter().all(|r| r[2] == r[3]));
    for name in ["field.dat", "record.csv", "matrix.txt", "manifest.txt"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    assert!(manifest.contains("steps = 0"));
    assert!(manifest.contains("density.dat "));
}

#[test]
fn snapshots_are_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let out = mbcl(&["simulate", "--t-final", "1/5", "--snapshot-stride", "5"], dir.path());
    assert!(out.status.success());
    let rows = rows(&dir.path().join("snapshots.dat"));
    assert_eq!(rows.len(), 2 * 701);
    assert_eq!(rows[0][0], "5");
}

#[test]
fn free_ring_levels_and_single_bin() {
    let dir = tempfile::tempdir().unwrap();
    let out = mbcl(&["levels", "--v", "0", "--e-max", "0.05", "--radius", "200", "--bins", "1"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let levels = rows(&dir.path().join("levels.dat"));
    // (n pi / 200)^2 <= 0.05 for n = 1..=14.
    assert_eq!(levels.len(), 14);
    let step = std::f64::consts::PI / 200.0;
    for (i, r) in levels.iter().enumerate() {
        let e: f64 = r[1].parse().unwrap();
        assert!((e - ((i + 1) as f64 * step).powi(2)).abs() < 1e-8);
    }
    let hist = rows(&dir.path().join("histogram.dat"));
    assert_eq!(hist.len(), 1);
    assert_eq!(hist[0][1], "13");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(mbcl(&["simulate", "--n", "1"], dir.path()).status.code(), Some(2));
    assert_eq!(mbcl(&["simulate", "--c", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(mbcl(&["simulate", "--scheme", "euler"], dir.path()).status.code(), Some(2));
    assert_eq!(mbcl(&["levels", "--bins", "0"], dir.path()).status.code(), Some(2));
    assert_eq!(mbcl(&["simulate", "--dx", "1/10", "--scheme", "paper_explicit"], dir.path()).status.code(), Some(2));

    // Report from an empty cache: every task is missing.
    let cache = dir.path().join("cache");
    let out = Command::new(env!("CARGO_BIN_EXE_mbcl"))
        .args(["report", "--n", "4", "--c", "1", "--periods", "28", "--cache-dir"])
        .arg(&cache)
        .arg("--out-dir")
        .arg(dir.path().join("report"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.conf");
    fs::write(&cfg, "# test\nn = 5\nc = 3/2\nt_final = 0\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mbcl"))
        .arg("--config")
        .arg(&cfg)
        .args(["simulate", "--n", "7", "--out-dir"])
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = fs::read_to_string(dir.path().join("o/manifest.txt")).unwrap();
    assert!(manifest.contains("n = 7"));
    assert!(manifest.contains("c = 3/2"));

    fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mbcl"))
        .arg("--config")
        .arg(&cfg)
        .args(["simulate", "--out-dir"])
        .arg(dir.path().join("o2"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dry_run_writes_only_the_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mbcl"))
        .args(["scan", "--n", "4,5", "--c", "1", "--periods", "28", "--dry-run", "--cache-dir"])
        .arg(dir.path().join("cache"))
        .arg("--out-dir")
        .arg(dir.path().join("o"))
        .output()
        .unwrap();
    assert!(out.status.success());
    let names: Vec<String> =
        fs::read_dir(dir.path().join("o")).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert_eq!(names, vec!["manifest.txt"]);
    let manifest = fs::read_to_string(dir.path().join("o/manifest.txt")).unwrap();
    assert!(manifest.contains("[tasks] 4"));
}
