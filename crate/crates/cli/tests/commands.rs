use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn models() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn qms(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qms-deco")).args(args).env("QMS_DECO_THREADS", "2").output().unwrap()
}

fn model(name: &str) -> String {
    models().join(name).to_string_lossy().into_owned()
}

#[test]
fn analyze_is_deterministic_and_valid_json() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = qms(&["analyze", &model("deco2.json"), "--budget", "4", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let ta = std::fs::read_to_string(&a).unwrap();
    assert_eq!(ta, std::fs::read_to_string(&b).unwrap());
    let v: Value = serde_json::from_str(&ta).unwrap();
    assert!((v["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["algebra_dim"], 2);
    assert_eq!(v["decoherence_times"][0]["dim"], 2);
}

#[test]
fn simulate_writes_a_parseable_curve() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curve.csv");
    let o = qms(&[
        "simulate",
        &model("deco2.json"),
        "--rho",
        "plus",
        "--alpha",
        "0.5",
        "--points",
        "9",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["t", "trace_dist", "df_variance", "df_entropy", "pi_bound", "mlsi_bound"]);
    let rows: Vec<Vec<f64>> =
        rdr.records().map(|r| r.unwrap().iter().map(|s| s.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 9);
    for r in &rows {
        // |+><+| has off-diagonal 1/2, so the distance to its pinching is e^{-t}.
        assert!((r[1] - (-r[0]).exp()).abs() < 1e-10);
        assert!(r[1] <= r[4] * (1.0 + 1e-9));
    }
}

#[test]
fn bipartite_curve_has_mutual_information() {
    let o = qms(&["simulate", &model("bipartite.json"), "--alpha", "0.5", "--points", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().last(), Some("mutual_info"));
    let mi: Vec<f64> = rdr.records().map(|r| r.unwrap()[6].parse().unwrap()).collect();
    assert!(mi.iter().all(|&x| x >= -1e-12));
    assert!(mi.windows(2).all(|w| w[1] <= w[0] + 1e-10));
}

#[test]
fn decotime_closed_form_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("times.csv");
    let o = qms(&["decotime", &model("deco4.json"), "--dims", "2,4,8", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("R^2"));
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 3);
    let d4: f64 = rows[1][2].parse().unwrap();
    assert!((d4 - (2.0 * 0.75 / 0.01f64).ln()).abs() < 1e-9);
}

#[test]
fn epsilon_of_one_gives_zero_empirical_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("times.csv");
    let o = qms(&["decotime", &model("deco2.json"), "--epsilon", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let mut rdr = csv::Reader::from_path(&out).unwrap();
    let row = rdr.records().next().unwrap().unwrap();
    assert_eq!(row[2].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"builder\": ").unwrap();
    assert_eq!(qms(&["analyze", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(qms(&["analyze", "/no/such/model.json"]).status.code(), Some(1));

    let negative = dir.path().join("neg.json");
    std::fs::write(&negative, r#"{"builder": {"kind": "deco", "dim": 2, "gamma": -1}}"#).unwrap();
    assert_eq!(qms(&["analyze", negative.to_str().unwrap()]).status.code(), Some(1));

    let unrealizable = dir.path().join("gamma.json");
    std::fs::write(
        &unrealizable,
        r#"{"builder": {"kind": "diagonal_gamma", "gamma": [
            [[0,0],[-10,0],[-0.01,0]], [[-10,0],[0,0],[-0.01,0]], [[-0.01,0],[-0.01,0],[0,0]]]}}"#,
    )
    .unwrap();
    assert_eq!(qms(&["analyze", unrealizable.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(qms(&["decotime", &model("bipartite.json"), "--dims", "2,3"]).status.code(), Some(1));
}

#[test]
fn check_passes_on_shipped_models() {
    for name in ["deco4.json", "complex_gamma.json"] {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("check.json");
        let o = qms(&["check", &model(name), "--samples", "4", "--budget", "4", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{name}: {}", String::from_utf8_lossy(&o.stderr));
        let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
        let checks = v["checks"].as_array().unwrap();
        assert!(checks.iter().all(|c| c["status"] != "fail"), "{name}");
    }
}
