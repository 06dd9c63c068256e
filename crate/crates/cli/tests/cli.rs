use std::io::Write;
use std::process::{Command, Output};

use eisenhart_core::connection::generalized_christoffel;
use eisenhart_core::curvature::riemann_at;
use eisenhart_core::metric::{builtin_model, metric_at};
use serde_json::Value;

const MINKOWSKI: &str = r#"
name = "minkowski"
[metric]
g = [["1", "0", "0", "0"],
     ["0", "-1", "0", "0"],
     ["0", "0", "-1", "0"],
     ["0", "0", "0", "-1"]]
"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eisenhart"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn model_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_error(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().expect("stderr has an error line");
    serde_json::from_str::<Value>(line).expect("stderr is JSON")["error"].clone()
}

#[test]
fn minkowski_blocks_are_zero() {
    let f = model_file(MINKOWSKI);
    let out = run(&["analyze", "--model", f.path().to_str().unwrap(), "--point", "0.3,1,-2,5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    for key in ["christoffel", "torsion", "riemann"] {
        assert_eq!(r[key].as_array().unwrap().len(), 0, "{key}");
    }
    assert_eq!(r["scalar"].as_f64(), Some(0.0));
    assert!(r["ricci"].as_array().unwrap().iter().flat_map(|row| row.as_array().unwrap()).all(|v| v.as_f64() == Some(0.0)));
    assert_eq!(r["torsion_matter"]["l_m"].as_f64(), Some(0.0));
}

#[test]
fn builtin_example_at_t1() {
    let out = run(&["analyze", "--model", "paper-example", "--point", "1,0,0,0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let find = |key: &str, idx: [u64; 3]| -> f64 {
        r[key]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["index"].as_array().unwrap().iter().map(|v| v.as_u64().unwrap()).eq(idx))
            .map_or(0.0, |c| c["value"].as_f64().unwrap())
    };
    // Γ_{0.11} = -s1'/2 = -t, Γ_{1.01} = t for s1 = 1 + t².
    assert!((find("christoffel_first_kind", [0, 1, 1]) + 1.0).abs() < 1e-12);
    assert!((find("christoffel_first_kind", [1, 0, 1]) - 1.0).abs() < 1e-12);
    // T_012 = -n3' with n3 = t; T_013 = -n4' with n4 = sin t.
    assert!((find("torsion", [0, 1, 2]) + 1.0).abs() < 1e-12);
    assert!((find("torsion", [0, 1, 3]) + 1f64.cos()).abs() < 1e-12);
    assert!((find("torsion", [0, 2, 1]) - 1.0).abs() < 1e-12);
    assert_eq!(r["torsion"].as_array().unwrap().len(), 18);
}

#[test]
fn corrupt_file_exits_1_with_offset() {
    let f = model_file("[metric\ng = 1");
    let out = run(&["analyze", "--model", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let e = stderr_error(&out);
    assert_eq!(e["code"], 1);
    assert!(e["offset"].as_u64().is_some());

    let bad = MINKOWSKI.replace("\"-1\", \"0\", \"0\"]", "\"-1 +\", \"0\", \"0\"]");
    let f = model_file(&bad);
    let out = run(&["analyze", "--model", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_error(&out)["kind"], "expression");
}

#[test]
fn missing_file_exits_1() {
    let out = run(&["analyze", "--model", "/nonexistent/model.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn singular_metric_exits_2() {
    let doc = MINKOWSKI.replace("[\"1\", \"0\", \"0\", \"0\"]", "[\"t\", \"0\", \"0\", \"0\"]");
    let f = model_file(&format!("{doc}\n[reference_point]\npoint = [1, 0, 0, 0]\n"));
    let out = run(&["analyze", "--model", f.path().to_str().unwrap(), "--point", "0,0,0,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error(&out)["kind"], "singular_metric");
}

#[test]
fn json_report_round_trips_bit_exactly() {
    let out = run(&["analyze", "--model", "paper-example", "--point", "1.37,0,0,0", "--format", "json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let again: Value = serde_json::from_str(&serde_json::to_string(&v).unwrap()).unwrap();
    assert_eq!(v, again);

    let m = builtin_model("paper-example").unwrap();
    let at = metric_at(&m, [1.37, 0.0, 0.0, 0.0]).unwrap();
    let cur = riemann_at(&generalized_christoffel(&at), &at);
    assert_eq!(v["scalar"].as_f64().unwrap().to_bits(), cur.scalar.to_bits());
    assert_eq!(v["metric"]["det_symmetric"].as_f64().unwrap().to_bits(), at.sym.det.to_bits());
    for i in 0..4 {
        for j in 0..4 {
            let got = v["ricci"][i][j].as_f64().unwrap();
            assert_eq!(got.to_bits(), cur.ricci.get(&[i, j]).to_bits(), "ricci[{i}][{j}]");
        }
    }
}

#[test]
fn verify_example_passes_and_strict_fails() {
    let out = run(&["verify-example"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASSED"));
    assert!(text.contains("L_M"));

    let out = run(&["verify-example", "--strict", "--format", "json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!json(&out)["ledger"].as_array().unwrap().is_empty());
}

#[test]
fn verify_example_skips_singular_point() {
    let out = run(&["verify-example", "--grid", "-1:1:11", "--s1", "t^2", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["skipped"].as_array().unwrap().len(), 1);
    assert_eq!(r["skipped"][0]["t"].as_f64(), Some(0.0));
}

#[test]
fn solve_profile_linear_case() {
    // s = 1, α = (1,0,0), v'+w = -1, target 3/2: n3' = 1 so n3 = t - t0.
    let out = run(&[
        "solve-profile", "--grid", "0:2:9", "--s0", "1", "--s1", "1", "--s2", "1", "--s3", "1",
        "--alpha", "1,0,0", "--target", "1.5", "--coeffs", "0,0,0,-1,0", "--format", "json",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    for row in r["rows"].as_array().unwrap() {
        let t = row["t"].as_f64().unwrap();
        let n3 = row["n"][0].as_f64().unwrap();
        assert!((n3 - t).abs() < 1e-8, "t = {t}, n3 = {n3}");
        assert_eq!(row["n_mirror"][0].as_f64().unwrap(), -n3);
    }
    assert!(r["max_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn solve_profile_zero_target_is_constant() {
    let out = run(&["solve-profile", "--target", "0", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    for row in r["rows"].as_array().unwrap() {
        for k in 0..3 {
            assert_eq!(row["n"][k].as_f64().unwrap(), 0.0);
        }
    }
}

#[test]
fn solve_profile_negative_radicand_exits_2() {
    let out = run(&["solve-profile", "--coeffs", "0,0,0,1,0"]);
    assert_eq!(out.status.code(), Some(2));
    let e = stderr_error(&out);
    assert_eq!(e["kind"], "negative_radicand");
    assert!(e["message"].as_str().unwrap().contains("t = 0.5"));
}

#[test]
fn linearity_check_passes() {
    let out = run(&["linearity-check", "--sets", "20", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["counterexample"]["gap"].as_f64().unwrap() > 0.1);
}

#[test]
fn shipped_models_analyze_cleanly() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models");
    for name in ["minkowski.toml", "torsion-demo.toml"] {
        let path = dir.join(name);
        let out = run(&["analyze", "--model", path.to_str().unwrap(), "--format", "json"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let out = run(&["analyze", "--model", dir.join("torsion-demo.toml").to_str().unwrap(), "--format", "json"]);
    let r = json(&out);
    assert_eq!(r["iz"]["mode"], "fixed_point");
    assert_eq!(r["matter_terms"]["labels"].as_array().unwrap().len(), 2);
    assert!(r["scalar_field"].is_object());
}
