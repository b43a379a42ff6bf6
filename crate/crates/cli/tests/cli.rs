use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn run(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asymconv"))
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs")
}

fn only_record(out: &Path) -> (Value, std::path::PathBuf) {
    let runs: Vec<_> = std::fs::read_dir(out.join("runs")).unwrap().map(|e| e.unwrap().path()).collect();
    assert_eq!(runs.len(), 1, "{runs:?}");
    let dir = runs[0].clone();
    let v: Value = serde_json::from_slice(&std::fs::read(dir.join("record.json")).unwrap()).unwrap();
    (v, dir)
}

#[test]
fn envelope_of_double_well_vanishes_at_origin() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["envelope", "--fn", "(x^2-1)^2", "--at", "0", "--at", "0.5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let (rec, dir) = only_record(tmp.path());
    assert_eq!(rec["passed"], true);
    let hull = rec["results"]["points"][0]["hull"].as_f64().unwrap();
    assert!(hull.abs() <= 1e-9, "{hull}");
    assert!(dir.join("curves/envelope.csv").is_file());
}

#[test]
fn extremal_sextic_record() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["extremal", "--N", "6", "--t0", "1"]);
    assert!(o.status.success());
    let (rec, dir) = only_record(tmp.path());
    let sol = &rec["results"]["solutions"][0]["result"];
    assert_eq!(sol["N"], 6);
    assert!((sol["q"].as_f64().unwrap() - 7.0 / 6.0).abs() < 2e-3);
    assert!((sol["K"].as_f64().unwrap() - 12.0 / 7.0).abs() < 3e-3);
    let csv = std::fs::read_to_string(dir.join("curves/extremal_sweep.csv")).unwrap();
    assert!(csv.starts_with("t0,q,q_over_t0_6,K\n"), "{csv}");
}

#[test]
fn asymptotic_l4_rho_at_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["--samples", "128", "asymptotic", "--space", "lp:4", "--t", "1", "--path", "both"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let (rec, _) = only_record(tmp.path());
    let row = &rec["results"]["values"][0];
    let expected = 2f64.powf(0.25) - 1.0;
    assert!((row["analytic"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert!((row["sampled"].as_f64().unwrap() - expected).abs() < 1e-9);
    assert_eq!(rec["results"]["model"], "tail");
}

#[test]
fn same_config_reproduces_results() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["--seed", "7", "moduli", "--norm", "lp:3", "--quantity", "delta", "--points", "4"];
    assert!(run(tmp.path(), &args).status.success());
    assert!(run(tmp.path(), &args).status.success());
    let (first, dir) = only_record(tmp.path());
    let second: Value = serde_json::from_slice(&std::fs::read(dir.join("record-2.json")).unwrap()).unwrap();
    assert_eq!(first["results"], second["results"]);
    assert_eq!(first["curves"], second["curves"]);
    assert_eq!(first["id"], second["id"]);

    let replay = run(tmp.path(), &["--replay", dir.join("record.json").to_str().unwrap()]);
    assert!(replay.status.success());
    let third: Value = serde_json::from_slice(&std::fs::read(dir.join("record-3.json")).unwrap()).unwrap();
    assert_eq!(first["results"], third["results"]);
}

#[test]
fn invalid_configs_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["extremal", "--N", "5"][..],
        &["moduli", "--norm", "lp:0.5"],
        &["moduli", "--norm", "bogus"],
        &["envelope", "--fn", "x^^2"],
        &["asymptotic", "--space", "lp:4", "--t", "-1"],
        &["export", "--record", "missing"],
    ] {
        let o = run(tmp.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn export_adds_log_columns_and_sidecar() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(run(tmp.path(), &["moduli", "--norm", "lp:4", "--quantity", "delta", "--points", "5"]).status.success());
    let (rec, dir) = only_record(tmp.path());
    let id = rec["id"].as_str().unwrap();
    let dest = tmp.path().join("exported");
    let o = run(tmp.path(), &["export", "--record", id, "--dest", dest.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dest.join("delta_l4_d2.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,value,log_t,log_value"));
    let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert!((first[2] - first[0].ln()).abs() < 1e-12);
    let meta: Value = serde_json::from_slice(&std::fs::read(dest.join("delta_l4_d2.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["bound_direction"], "upper");
    assert!(dir.join("curves/delta_l4_d2.csv").is_file());
}

#[test]
fn verify_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["verify"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
    let (rec, _) = only_record(tmp.path());
    let claims = rec["results"]["claims"].as_array().unwrap();
    assert!(claims.len() >= 11);
    assert!(claims.iter().all(|c| c["pass"] == true));
}

#[test]
fn zero_tolerance_scale_fails_inexact_claims() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(tmp.path(), &["verify", "--tolerance-scale", "0"]);
    assert_eq!(o.status.code(), Some(1));
}
