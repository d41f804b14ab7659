use std::process::{Command, Output};

use serde_json::Value;

fn qc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qc")).args(args).output().expect("qc runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = qc(&all);
    (serde_json::from_slice(&o.stdout).expect("json output"), o.status.code().unwrap())
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/output.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn assert_valid(doc: &Value) {
    let v = schema();
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{errors:?}");
}

#[test]
fn constants_rows() {
    let (doc, code) = json(&["constants", "--d", "-10,2310"]);
    assert_eq!(code, 0);
    assert_valid(&doc);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows[0]["d"], -10);
    assert!((rows[0]["percentage"].as_f64().unwrap() - 55.99729).abs() < 1.0);
    assert!((rows[1]["percentage"].as_f64().unwrap() - 93.74184).abs() < 0.01);
    assert_eq!(rows[1]["qualitative"], true);
}

#[test]
fn bad_field_is_a_row_error() {
    let (doc, code) = json(&["constants", "--d", "4,-1"]);
    assert_eq!(code, 2);
    assert_valid(&doc);
    let rows = doc["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["error"].as_str().unwrap().contains("not squarefree"));
    assert!(rows[0]["s4_constant"].is_null());
    assert!(rows[1]["error"].is_null());
}

#[test]
fn config_errors_exit_one() {
    assert_eq!(qc(&["constants", "--d", "2", "--euler-cutoff", "5"]).status.code(), Some(1));
    assert_eq!(qc(&["table", "--set", "3"]).status.code(), Some(1));
    assert_eq!(qc(&["omega", "--limit", "1000", "--y", "40"]).status.code(), Some(1));
    assert_eq!(qc(&["bogus"]).status.code(), Some(1));
    assert_eq!(qc(&["--help"]).status.code(), Some(0));
}

#[test]
fn table_two_csv() {
    let o = qc(&["table", "--set", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "d,s4_constant,s4_published,s4_rel_dev,d4_constant,d4_published,d4_rel_dev,percentage,percentage_published,percentage_dev,error"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 13);
    assert!(rows[0].starts_with("-1,0.01916,0.01916,"));
    for r in &rows {
        let cells: Vec<&str> = r.split(',').collect();
        // every numeric cell carries exactly five decimals
        assert!(cells[1..10].iter().all(|c| c.split('.').nth(1).is_some_and(|f| f.len() == 5)), "{r}");
    }
    assert!(!text.contains('\r'));
}

#[test]
fn table_one_row_set() {
    let (doc, code) = json(&["table", "--set", "1", "--bound", "100"]);
    assert_eq!(code, 0);
    assert_valid(&doc);
    let ds: Vec<i64> = doc["rows"].as_array().unwrap().iter().map(|r| r["d"].as_i64().unwrap()).collect();
    assert_eq!(ds, [2, -2, 6, -6, 30, -30, 210, -210, 2310, -2310, 30030, -30030, 510510, -510510]);
}

#[test]
fn output_is_reproducible() {
    let a = qc(&["constants", "--d", "-5,6,-30", "--threads", "1"]);
    let b = qc(&["constants", "--d", "-5,6,-30", "--threads", "3"]);
    let c = Command::new(env!("CARGO_BIN_EXE_qc"))
        .args(["constants", "--d", "-5,6,-30"])
        .env("QC_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rows.json");
    let o = qc(&["ratio-bound", "--d", "-510510", "--y", "17", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_valid(&doc);
    let row = &doc["rows"][0];
    assert_eq!(row["omega_y"], 7);
    assert_eq!(row["qualitative"], true);
    assert!(row["nonstat_ratio"].as_f64().unwrap() > 0.0);
}

#[test]
fn moments_row() {
    let (doc, code) = json(&["moments", "--modulus", "255255", "--y", "17"]);
    assert_eq!(code, 0);
    assert_valid(&doc);
    let row = &doc["rows"][0];
    assert_eq!(row["family_size"], 63);
    let exact = row["second_moment_exact"].as_f64().unwrap();
    assert!((exact - row["second_moment_truncated"].as_f64().unwrap()).abs() <= 0.1);
    assert!(row["fraction_meeting"].as_f64().unwrap() >= 0.75);
}

#[test]
fn omega_row_with_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("census.bin");
    let args = ["omega", "--limit", "10000", "--y", "10", "--sample", "4", "--sample-limit", "500", "--cache", cache.to_str().unwrap()];
    let (first, code) = json(&args);
    assert_eq!(code, 0);
    assert_valid(&first);
    assert!(cache.exists());
    let (second, _) = json(&args);
    assert_eq!(first["rows"], second["rows"]);
    let row = &first["rows"][0];
    assert_eq!(row["count"], 6086);
    assert_eq!(row["theoretical_mean"].as_f64().unwrap(), 0.8749999999999999);
    assert!(row["exceedance_k2"].as_f64().unwrap() <= 0.25);
}
