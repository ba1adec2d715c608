use std::fs;
use std::path::Path;
use std::process::Command;

fn run(args: &[&str], out: &Path) -> (i32, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_spim-isac"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .arg("--quiet")
        .env_remove("ISAC_SEED")
        .output()
        .expect("spawn binary");
    let stderr = String::from_utf8_lossy(&output.stderr).into_owned();
    (output.status.code().unwrap_or(-1), stderr)
}

#[test]
fn selftest_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let (code, err) = run(&["selftest"], dir.path());
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(dir.path().join("selftest.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("check,passed,detail"));
    assert!(lines.all(|l| l.split(',').nth(1) == Some("true")));
    assert!(dir.path().join("selftest.manifest.json").exists());
}

#[test]
fn mi_vs_snr_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["mi-vs-snr", "--trials", "10", "--seed", "7"];
    assert_eq!(run(&args, a.path()).0, 0);
    assert_eq!(run(&args, b.path()).0, 0);
    let x = fs::read(a.path().join("mi_vs_snr.csv")).unwrap();
    let y = fs::read(b.path().join("mi_vs_snr.csv")).unwrap();
    assert_eq!(x, y);

    let text = String::from_utf8(x).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("axis_value,mi_spim,mi_mmwave_num,mi_mmwave_cf,stderr_spim,stderr_mmwave_num,trials")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.len() == 7 && r[6] == 10.0));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("mi_vs_snr.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 7);
}

#[test]
fn seed_env_var_matches_flag() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    run(&["mi-vs-gain", "--trials", "4", "--seed", "21"], a.path());
    let status = Command::new(env!("CARGO_BIN_EXE_spim-isac"))
        .args(["mi-vs-gain", "--trials", "4", "--quiet", "--out-dir"])
        .arg(b.path())
        .env("ISAC_SEED", "21")
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(
        fs::read(a.path().join("mi_vs_gain.csv")).unwrap(),
        fs::read(b.path().join("mi_vs_gain.csv")).unwrap()
    );
}

#[test]
fn beampattern_writes_two_panels() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["beampattern"], dir.path()).0, 0);
    for k in 1..=2 {
        let text = fs::read_to_string(dir.path().join(format!("beampattern_i{k}.csv"))).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("angle_deg,eta_0,eta_0.3,eta_0.5,eta_0.8,eta_1"));
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 1801);
        for row in rows {
            let vals: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!(vals.len(), 6);
            assert!(vals[1..].iter().all(|&v| (-60.0..=0.0).contains(&v)));
        }
    }
}

#[test]
fn doa_writes_runs_and_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("doa.toml");
    fs::write(&cfg, "doa_runs = 5\ngrid_step_deg = 0.5\n").unwrap();
    assert_eq!(run(&["doa", "--config", cfg.to_str().unwrap()], dir.path()).0, 0);
    let runs = fs::read_to_string(dir.path().join("doa_runs.csv")).unwrap();
    assert_eq!(runs.lines().next(), Some("run,seed,true_deg,estimate_deg,abs_error_deg"));
    assert_eq!(runs.lines().count(), 6);
    let spec = fs::read_to_string(dir.path().join("doa_spectrum.csv")).unwrap();
    assert_eq!(spec.lines().next(), Some("angle_deg,spectrum_db"));
    assert_eq!(spec.lines().count(), 362);
}

#[test]
fn bad_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["frobnicate"], dir.path()).0, 2);

    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "n_rf = 4\nn_s = 4\n").unwrap();
    let (code, err) = run(&["mi-vs-snr", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, 2, "{err}");

    fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(run(&["selftest", "--config", cfg.to_str().unwrap()], dir.path()).0, 2);
}
