use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn pap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pap"))
        .args(args)
        .env_remove("PAP_WORKERS")
        .output()
        .unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn missing_config_is_an_io_error() {
    let out = pap(&["stirap", "--config", "no/such/file.cfg"]);
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("no/such/file.cfg"), "{stderr}");
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("three_level.cfg")).unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, text.replace("n_pairs = 50", "n_pairs = 50\nn_pulses = 3")).unwrap();
    let out = pap(&["stirap", "--config", path_str(&cfg)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_pulses"));
}

#[test]
fn stirap_run_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("three_level.cfg");
    let before = std::fs::read(&cfg).unwrap();
    let out = pap(&["stirap", "--config", path_str(&cfg), "--out", path_str(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(std::fs::read(&cfg).unwrap(), before);

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let target = summary["result"]["final_target"].as_f64().unwrap();
    assert!(target >= 0.95, "{target}");
    assert_eq!(summary["fingerprint"].as_str().unwrap().len(), 64);

    let csv = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    let header = csv.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header.split(',').count(), 3 + 2);
    assert!(csv.lines().next().unwrap().contains("fingerprint="));
}

#[test]
fn runs_are_byte_identical() {
    let cfg = configs().join("three_level.cfg");
    let render = || {
        let dir = tempfile::tempdir().unwrap();
        let out = pap(&["stirap", "--config", path_str(&cfg), "--out", path_str(dir.path())]);
        assert!(out.status.success());
        ["trajectory.csv", "summary.json", "schedule.txt"].map(|f| std::fs::read(dir.path().join(f)).unwrap())
    };
    assert_eq!(render(), render());
}

#[test]
fn scan_and_fft_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("beat_demo.cfg");
    let out = pap(&["scan", "--config", path_str(&cfg), "--out", path_str(dir.path()), "--workers", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let map = std::fs::read_to_string(dir.path().join("map.csv")).unwrap();
    let rows: Vec<&str> = map.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].split(',').count(), 1 + 32);
    assert!(rows[1].starts_with("1310.5364,"));

    let map_path = dir.path().join("map.csv");
    let out = pap(&[
        "analyze-fft",
        "--config",
        path_str(&cfg),
        "--out",
        path_str(dir.path()),
        "--map",
        path_str(&map_path),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("spectrum.csv").exists());
    assert!(String::from_utf8_lossy(&out.stdout).contains("peak_cm1="));
}

#[test]
fn zero_workers_rejected() {
    let cfg = configs().join("beat_demo.cfg");
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_pap"))
        .args(["scan", "--config", path_str(&cfg), "--out", path_str(dir.path())])
        .env("PAP_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
