use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hwmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hwmlab")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn passing_run_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "id.toml", "samples = 2\n");
    let out = dir.path().join("out");
    let o = hwmlab(&["identities", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS identity_")).count(), 10);
    let report: serde_json::Value = serde_json::from_slice(&fs::read(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["pass"], true);
    assert_eq!(report["config_echo"]["out_dir"], out.to_str().unwrap());
}

#[test]
fn failed_gate_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "sim.toml",
        "n = 32\nt_final = 0.1\ndt = 0.01\nwaveform_t = 0.2\ntol_conservation = 1e-30\n",
    );
    let o = hwmlab(&["simulate", "--config", &cfg, "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL energy_drift"));
}

#[test]
fn config_errors_exit_two_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let unknown = write_config(dir.path(), "bad.toml", "sampels = 3\n");
    let o = hwmlab(&["operators", "--config", &unknown]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("sampels"), "{}", stderr(&o));

    let range = write_config(dir.path(), "range.toml", "sobolev_alpha = 4.0\n");
    let o = hwmlab(&["inequalities", "--config", &range]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("Sobolev inequality needs 0 < α < d"), "{}", stderr(&o));

    let o = hwmlab(&["operators", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hwmlab(&["operators"]).status.code(), Some(2));
    assert_eq!(hwmlab(&["bogus", "--config", "x.toml"]).status.code(), Some(2));
}

#[test]
fn identical_runs_write_identical_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "g.toml", "d = 1\nn = 32\nt_final = 0.05\ndt = 0.01\nepsilon = [1e-2, 1e-3]\n");
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for out in [&a, &b] {
        let o = hwmlab(&["gronwall", "--config", &cfg, "--seed", "5", "--out", out.to_str().unwrap()]);
        assert!(o.status.code() == Some(0) || o.status.code() == Some(1), "{}", stderr(&o));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert!(names.iter().filter(|n| n.to_string_lossy().ends_with(".csv")).count() >= 3);
    for n in &names {
        if n.to_string_lossy().ends_with(".csv") {
            assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n:?}");
        }
    }
    let sidecar: serde_json::Value =
        serde_json::from_slice(&fs::read(a.join("gronwall_alpha1.25_eps1e-2.json")).unwrap()).unwrap();
    assert_eq!(sidecar["seed"], 5);
    assert_eq!(sidecar["epsilon"], 0.01);
}

#[test]
fn seed_flag_changes_random_samples() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "q.toml", "samples = 2\nn = 8\nkernel_n = 32\nkernel_k_max = 4\n");
    let run = |seed: &str, out: &str| {
        let out = dir.path().join(out);
        let o = hwmlab(&["inequalities", "--config", &cfg, "--seed", seed, "--out", out.to_str().unwrap()]);
        assert!(o.status.code() == Some(0) || o.status.code() == Some(1), "{}", stderr(&o));
        fs::read(out.join("quotients.csv")).unwrap()
    };
    assert_ne!(run("1", "s1"), run("2", "s2"));
}
