//! Exit codes and JSON report schemas of the command-line front end.
//!
//! Schemas are compared against `tests/golden/*.json`; set
//! `WEAKHJ_UPDATE_GOLDEN=1` to rewrite them after an intended change.

use std::fs;
use std::path::PathBuf;

use serde_json::{json, Map, Value};
use weakhj::cli::{run, EXIT_INPUT, EXIT_OK, EXIT_VIOLATION};

fn run_args(args: &[&str]) -> (i32, String) {
    let mut buf = Vec::new();
    let code = run(std::iter::once("weakhj").chain(args.iter().copied()), &mut buf);
    (code, String::from_utf8(buf).unwrap())
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let (code, out) = run_args(args);
    let v = serde_json::from_str(&out).unwrap_or_else(|e| panic!("not JSON ({e}): {out}"));
    (code, v)
}

/// Shape of a JSON value: object keys with the shapes of their values, the
/// shape of the first array element, and scalar type names.
fn schema(v: &Value) -> Value {
    match v {
        Value::Object(m) => Value::Object(m.iter().map(|(k, x)| (k.clone(), schema(x))).collect::<Map<_, _>>()),
        Value::Array(items) => json!([items.first().map(schema).unwrap_or(Value::Null)]),
        Value::Number(_) => json!("number"),
        Value::String(_) => json!("string"),
        Value::Bool(_) => json!("bool"),
        Value::Null => json!("null"),
    }
}

fn check_golden(name: &str, v: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{name}.json"));
    let got = schema(v);
    if std::env::var_os("WEAKHJ_UPDATE_GOLDEN").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, serde_json::to_string_pretty(&got).unwrap() + "\n").unwrap();
        return;
    }
    let text = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden file {}", path.display()));
    let want: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(got, want, "schema of `{name}` changed");
}

fn temp_json(dir: &tempfile::TempDir, name: &str, v: &Value) -> String {
    let p = dir.path().join(name);
    fs::write(&p, v.to_string()).unwrap();
    p.display().to_string()
}

#[test]
fn space_schema_and_validation() {
    let (code, v) = run_json(&["space", "--example", "hypercube(2)"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["labels"][3], "11");
    check_golden("space", &v);

    let dir = tempfile::tempdir().unwrap();
    let bad = temp_json(&dir, "bad.json", &json!({"dist": [[0, 1, 5], [1, 0, 1], [5, 1, 0]]}));
    let (code, v) = run_json(&["space", "--validate", &bad]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(v["error"]["kind"], "metric");
    assert_eq!(v["error"]["witness"]["violation"], "triangle");
    check_golden("error_metric", &v);

    let graph = temp_json(&dir, "g.json", &json!({"n": 3, "edges": [[0, 1], [1, 2, 2.5]]}));
    let (code, v) = run_json(&["space", "--space", &graph]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["dist"][0][2], 3.5);

    let (code, v) = run_json(&["space", "--space", "/no/such/file.json"]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(v["error"]["kind"], "io");
    let garbage = dir.path().join("x.json");
    fs::write(&garbage, "{not json").unwrap();
    let (code, v) = run_json(&["space", "--space", garbage.to_str().unwrap()]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(v["error"]["kind"], "parse");
}

#[test]
fn qtilde_and_hj_reports() {
    let (code, v) = run_json(&[
        "qtilde",
        "--example",
        "two-point",
        "--f",
        "[1,0]",
        "--t",
        "0.5",
        "--oracle-grid",
        "11",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!((v["values"][0].as_f64().unwrap() - 0.75).abs() < 1e-12);
    assert!((v["time_derivative"][0].as_f64().unwrap() + 0.5).abs() < 1e-12);
    check_golden("qtilde", &v);

    let (code, v) = run_json(&[
        "hj-verify",
        "--example",
        "path(4)",
        "--f",
        "[0,2,1,3]",
        "--cost",
        "qlin:a=0.5,h=1",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["holds"], true);
    check_golden("hj_verify", &v);

    let (code, out) = run_args(&[
        "hj-verify",
        "--example",
        "two-point",
        "--f",
        "[1,0]",
        "--csv",
        "--t-grid",
        "0.5",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(out.lines().count(), 3);
    assert!(out.starts_with("conjugate,ddt,gradient,holds,residual,t,value,x"));

    let (code, v) = run_json(&["qtilde", "--example", "two-point", "--f", "[1,0,2]", "--t", "0.5"]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(v["error"]["kind"], "dimension_mismatch");
}

#[test]
fn obstruction_exit_codes() {
    let (code, v) = run_json(&["obstruction", "--example", "path(3)"]);
    assert_eq!(code, EXIT_VIOLATION);
    assert_eq!(v["outcome"], "witness");
    check_golden("obstruction", &v);
}

#[test]
fn transport_reports() {
    let (code, v) = run_json(&[
        "ttilde",
        "--example",
        "two-point",
        "--mu",
        "[0.5,0.5]",
        "--nu",
        "[1,0]",
        "--oracle",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!((v["result"]["value"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert!((v["oracle"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    check_golden("ttilde", &v);

    let (code, v) = run_json(&["te-verify", "--example", "two-point", "--c", "0.5", "--samples", "100"]);
    assert_eq!(code, EXIT_OK);
    check_golden("te_verify", &v);
    let (code, v) = run_json(&[
        "te-verify",
        "--example",
        "two-point",
        "--c",
        "0.005",
        "--samples",
        "100",
    ]);
    assert_eq!(code, EXIT_VIOLATION);
    assert_eq!(v["verdict"], "violated");
    assert!(v["witness"].is_array());
    let (code, _) = run_json(&[
        "te-verify",
        "--example",
        "two-point",
        "--c",
        "1",
        "--form",
        "dual",
        "--samples",
        "100",
    ]);
    assert_eq!(code, EXIT_OK);
}

#[test]
fn constants_and_chain() {
    let (code, v) = run_json(&[
        "constants",
        "--example",
        "two-point",
        "--which",
        "poincare",
        "--restarts",
        "4",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!((v["best_ratio"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    check_golden("constants", &v);
    let (code, v) = run_json(&[
        "constants",
        "--which",
        "k",
        "--c",
        "1",
        "--lip",
        "1",
        "--example",
        "two-point",
    ]);
    assert_eq!(code, EXIT_OK);
    assert!((v["k"].as_f64().unwrap() - 1478.608755581849).abs() < 1e-9);
    let (code, v) = run_json(&[
        "constants",
        "--which",
        "k",
        "--c",
        "1",
        "--lip",
        "2",
        "--example",
        "two-point",
    ]);
    assert_eq!(code, EXIT_INPUT);
    assert_eq!(v["error"]["kind"], "domain");
    let (code, _) = run_json(&[
        "constants",
        "--example",
        "two-point",
        "--which",
        "mlsi1",
        "--c",
        "0.01",
        "--restarts",
        "4",
    ]);
    assert_eq!(code, EXIT_VIOLATION);

    let (code, v) = run_json(&[
        "chain-verify",
        "--example",
        "two-point",
        "--mlsi-constant",
        "0.5",
        "--restarts",
        "4",
        "--iterations",
        "100",
        "--samples",
        "100",
    ]);
    // transport at C/2 fails on two points, so the chain reports a violation
    assert_eq!(code, EXIT_VIOLATION);
    assert!(v["violations"].as_u64().unwrap() > 0);
    check_golden("chain_verify", &v);
}

#[test]
fn examples_reports() {
    let (code, v) = run_json(&["examples", "two-point", "--restarts", "4"]);
    assert_eq!(code, EXIT_OK);
    assert!((v["transport_to_dirac"].as_f64().unwrap() - 0.25).abs() < 1e-9);
    assert!((v["poincare"]["best_ratio"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    check_golden("examples_two_point", &v);
    let (code, v) = run_json(&[
        "examples",
        "hypercube",
        "--n",
        "2",
        "--restarts",
        "4",
        "--samples",
        "50",
    ]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(v["targets"].as_array().unwrap().len(), 4);
    check_golden("examples_hypercube", &v);
}

#[test]
fn manifest_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let m1 = dir.path().join("m1.json");
    let m2 = dir.path().join("m2.json");
    let mu = temp_json(&dir, "mu.json", &json!([0.2, 0.3, 0.5]));
    for m in [&m1, &m2] {
        let (code, _) = run_args(&[
            "te-verify",
            "--example",
            "path(3)",
            "--mu",
            &mu,
            "--c",
            "4",
            "--samples",
            "50",
            "--seed",
            "7",
            "--manifest",
            m.to_str().unwrap(),
        ]);
        assert_eq!(code, EXIT_OK);
    }
    let a: Value = serde_json::from_str(&fs::read_to_string(&m1).unwrap()).unwrap();
    let b: Value = serde_json::from_str(&fs::read_to_string(&m2).unwrap()).unwrap();
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["inputs"], b["inputs"]);
    assert_eq!(a["seed"], 7);
    assert_eq!(a["inputs"].as_array().unwrap().len(), 2);
    assert_eq!(a["inputs"][1]["sha256"].as_str().unwrap().len(), 64);
    check_golden("manifest", &a);
}
