use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn fhn(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fhn")).args(args).output().unwrap();
    let stdout = String::from_utf8(out.stdout).unwrap();
    let json = serde_json::from_str(&stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json, String::from_utf8(out.stderr).unwrap())
}

fn arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn regime_reports_config_and_admissibility() {
    let (code, v, _) = fhn(&["regime"]);
    assert_eq!(code, 0);
    assert_eq!(v["admissible"], true);
    assert_eq!(v["config"]["gamma"], 50.0);
    let (code, v, _) = fhn(&["regime", "--kind", "reversed", "--gamma", "70"]);
    assert_eq!(code, 2, "{v}");
}

#[test]
fn bad_input_exits_with_one() {
    for args in [&["bogus"][..], &["regime", "--beta", "0.7"], &["regime", "--d", "-1"], &["sweep", "--d-list", "1e-5,2e-5,3e-5"]] {
        let (code, _, err) = fhn(args);
        assert_eq!(code, 1, "{args:?}: {err}");
        assert!(!err.is_empty());
    }
}

#[test]
fn config_file_is_read_and_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "beta = 0.4\ngamma = 30\n").unwrap();
    let (code, v, _) = fhn(&["regime", "--config", arg(&cfg), "--gamma", "40"]);
    assert_eq!(code, 0);
    assert_eq!(v["config"]["beta"], 0.4);
    assert_eq!(v["config"]["gamma"], 40.0);
    std::fs::write(&cfg, "colour = blue\n").unwrap();
    assert_eq!(fhn(&["regime", "--config", arg(&cfg)]).0, 1);
}

#[test]
fn saved_wave_validates_identically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rev");
    let (code, v, err) = fhn(&["front", "--reversed", "--out", arg(&out)]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(v["wave"]["status"], "accepted");
    for f in ["wave.json", "profile.csv", "config.txt"] {
        assert!(out.join(f).exists(), "{f}");
    }
    let (code, v, _) = fhn(&["validate", "--input", arg(&out)]);
    assert_eq!(code, 0);
    assert_eq!(v["identical"], true);
    // A perturbed profile no longer reproduces the stored report.
    let csv = std::fs::read_to_string(out.join("profile.csv")).unwrap();
    let mut lines: Vec<String> = csv.lines().map(String::from).collect();
    let mid = lines.len() / 2;
    let mut cells: Vec<String> = lines[mid].split(',').map(String::from).collect();
    let u: f64 = cells[1].parse().unwrap();
    cells[1] = (u + 0.05).to_string();
    lines[mid] = cells.join(",");
    std::fs::write(out.join("profile.csv"), lines.join("\n") + "\n").unwrap();
    let (_, v, _) = fhn(&["validate", "--input", arg(&out)]);
    assert_eq!(v["identical"], false);
    assert_eq!(fhn(&["validate", "--input", arg(&dir.path().join("missing"))]).0, 1);
}

#[test]
fn simulation_writes_snapshot_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, v, err) = fhn(&["simulate", "--sim-n", "1024", "--tau-max", "300", "--no-predict", "--out", arg(dir.path())]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(v["runs"][0]["outcome"], "front_right");
    let mut rd = csv::Reader::from_path(dir.path().join("sim_front.csv")).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["tau", "y", "u", "v"]);
    let rows: Vec<Vec<f64>> = rd.records().map(|r| r.unwrap().iter().map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 1024);
    assert!(rows.windows(2).all(|w| w[1][1] > w[0][1]));
    let report: Value = serde_json::from_reader(std::fs::File::open(dir.path().join("sim_front.json")).unwrap()).unwrap();
    assert_eq!(report["sigma_measured"], v["runs"][0]["sigma_measured"]);
}

#[test]
fn sweep_csv_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    // Fast fronts exist only for the smallest d here, so the sweep is partial.
    let (code, v, err) = fhn(&["sweep", "--d-list", "1e-4,3e-5,1e-5", "--out", arg(dir.path())]);
    assert_eq!(code, 3, "{err}");
    let mut rd = csv::Reader::from_path(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), ["d", "c", "dc2", "sup_u", "v_at_zetaM"]);
    let rows: Vec<Vec<String>> = rd.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[0][1].is_empty() && rows[1][1].is_empty());
    let c: f64 = rows[2][1].parse().unwrap();
    assert_eq!(Value::from(c), v["rows"][2]["c"]);
    assert!(v["rows"][0]["error"].is_string());
}
