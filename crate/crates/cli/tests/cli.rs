use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specseq")).args(args).output().expect("binary runs")
}

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

/// Runs with `--out` and returns the exit code, standard output and the JSON document.
fn run_json(args: &[&str]) -> (i32, String, Value, PathBuf, tempfile::TempDir) {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.json");
    let mut full: Vec<&str> = args.to_vec();
    let out_s = out.display().to_string();
    full.extend(["--out", &out_s]);
    let o = bin(&full);
    let json = std::fs::read_to_string(&out).map(|t| serde_json::from_str(&t).unwrap()).unwrap_or(Value::Null);
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), json, out, dir)
}

fn dims(v: &Value) -> Vec<u64> {
    v.as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect()
}

#[test]
fn oracle_for_c2_is_periodic() {
    let (code, stdout, json, _, _d) = run_json(&["oracle", "--group", "cyclic:2", "--p", "2", "--degree", "5"]);
    assert_eq!(code, 0);
    assert_eq!(dims(&json["dims"]), vec![1; 6]);
    assert_eq!(json["schema"], 1);
    assert!(stdout.contains("H^5  1"));
}

#[test]
fn hopf_check_on_s3_over_gf3() {
    let (code, _, json, _, _d) = run_json(&["hopf-check", "--group", "s3", "--p", "3", "--subgroup", "0,3,4"]);
    assert_eq!(code, 0);
    let checks = json["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 17 + 4);
    assert!(checks.iter().all(|c| c["holds"] == true));
    assert_eq!(json["verdict"], true);
}

#[test]
fn lhs_for_c4_over_c2() {
    let (code, stdout, json, _, _d) = run_json(&["lhs", "--group", "cyclic:4", "--subgroup", "0,2", "--module", "trivial", "--degree", "5", "--pages", "4"]);
    assert_eq!(code, 0);
    let e2 = &json["pages"][0];
    assert_eq!(e2["r"], 2);
    let entries = e2["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 21);
    assert!(entries.iter().all(|e| e["dim"] == 1));
    assert_eq!(json["pages"].as_array().unwrap().len(), 4);
    assert_eq!(json["report"]["verdict"], true);
    assert!(stdout.starts_with("E_2\n"));
    assert!(stdout.contains("verdict                                     true"));
}

#[test]
fn same_descriptor_gives_identical_json() {
    let args = ["lhs", "--instance", &data("c4_jordan.json"), "--degree", "2"];
    let (c1, s1, _, p1, _d1) = run_json(&args);
    let (c2, s2, _, p2, _d2) = run_json(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(s1, s2);
    assert_eq!(std::fs::read(p1).unwrap(), std::fs::read(p2).unwrap());
}

#[test]
fn explicit_module_from_instance_file() {
    let (code, _, json, _, _d) = run_json(&["oracle", "--instance", &data("c4_jordan.json")]);
    assert_eq!(code, 0);
    assert_eq!(dims(&json["dims"]), vec![1, 1, 1, 1]);
    let (code, _, json, _, _d) = run_json(&["oracle", "--instance", &data("c4_jordan.json"), "--module", "regular"]);
    assert_eq!(code, 0);
    assert_eq!(dims(&json["dims"]), vec![1, 0, 0, 0]);
}

#[test]
fn filtered_complex_pages() {
    let (code, _, json, _, _d) = run_json(&["homology", "--complex", &data("filtered.toml"), "--pages", "2"]);
    assert_eq!(code, 0);
    assert_eq!(dims(&json["homology"]), vec![0, 0]);
    let page = |i: usize| -> Vec<(i64, i64, u64)> {
        json["pages"][i]["entries"].as_array().unwrap().iter().map(|e| (e["p"].as_i64().unwrap(), e["q"].as_i64().unwrap(), e["dim"].as_u64().unwrap())).filter(|e| e.2 > 0).collect()
    };
    assert_eq!(page(0), vec![(-1, 1, 1), (0, 1, 1)]);
    assert!(page(1).is_empty());
    assert!(json["pages"][2]["r"].is_null());
}

#[test]
fn comparisons_and_resolutions_run() {
    let (code, _, json, _, _d) = run_json(&["compare-first", "--group", "cyclic:4", "--subgroup", "0,2", "--degree", "2"]);
    assert_eq!(code, 0);
    assert_eq!(json["report"]["verdict"], true);
    let (code, _, json, _, _d) = run_json(&["compare-second", "--group", "cyclic:2", "--setting", "change-of-rings", "--padded", "--degree", "2"]);
    assert_eq!(code, 0);
    assert_eq!(json["report"]["verdict"], true);
    let (code, _, json, _, _d) = run_json(&["compare-first", "--group", "cyclic:2", "--setting", "hom-identity", "--degree", "2"]);
    assert_eq!(code, 0);
    assert_eq!(json["report"]["verdict"], true);
    let (code, _, json, _, _d) = run_json(&["gss", "--group", "cyclic:4", "--subgroup", "0,2", "--degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(json["verdict"], true);
    let (code, _, json, _, _d) = run_json(&["resolve", "--group", "klein4", "--degree", "3"]);
    assert_eq!(code, 0);
    assert_eq!(dims(&json["dims"]), vec![4, 8, 12, 16]);
}

#[test]
fn usage_errors_exit_with_one_and_write_nothing() {
    let bad: [&[&str]; 5] = [
        &["oracle", "--group", "dihedral"],
        &["lhs", "--group", "cyclic:4", "--subgroup", "0,1"],
        &["lhs", "--group", "cyclic:4", "--subgroup", "0,7"],
        &["oracle", "--group", "cyclic:2", "--p", "4"],
        &["frobnicate"],
    ];
    for args in bad {
        let (code, stdout, json, out, _d) = run_json(args);
        assert_eq!(code, 1, "{args:?}");
        assert!(stdout.is_empty(), "{args:?}");
        assert!(json.is_null() && !out.exists(), "{args:?}");
    }
    let dir = tempfile::tempdir().unwrap();
    let doc = dir.path().join("bad.json");
    std::fs::write(&doc, r#"{"schema": 2, "group": "cyclic:2"}"#).unwrap();
    let o = bin(&["oracle", "--instance", &doc.display().to_string()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("schema"));
}

#[test]
fn gss_functor_registry() {
    let abut = |json: &Value| json["identification"]["abutment"].as_array().unwrap().iter().map(|e| e["entry"].as_u64().unwrap()).collect::<Vec<_>>();
    let (code, _, json, _, _d) = run_json(&["gss", "--group", "cyclic:2", "--degree", "2", "--f", "tensor", "--g", "identity"]);
    assert_eq!(code, 0);
    assert_eq!(abut(&json), vec![2, 0, 0]);
    for (f, g) in [("hom_from", "identity"), ("hom_into", "identity"), ("identity", "hom_from")] {
        let (code, _, json, _, _d) = run_json(&["gss", "--group", "cyclic:2", "--degree", "2", "--f", f, "--g", g]);
        assert_eq!(code, 0, "{f} then {g}");
        assert_eq!(json["verdict"], true);
        assert_eq!(abut(&json), vec![1, 1, 1], "{f} then {g}");
    }
    assert_eq!(bin(&["gss", "--group", "cyclic:2", "--f", "colimit"]).status.code(), Some(1));
}
