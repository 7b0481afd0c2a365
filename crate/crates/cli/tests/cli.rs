use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn knormal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_knormal")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn analyze_bg4() {
    let out = knormal(&["analyze", "--family", "bruns_gubeladze:s=4", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["k_p"], 3);
    assert_eq!(r["d_p"], 2);
    assert_eq!(r["nu_p"], 2);
    assert_eq!(r["very_ample"], true);
    assert_eq!(r["simplex"], false);
}

#[test]
fn generate_round_trips_into_analyze() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t31.json");
    let out = knormal(&["generate", "--family", "rabinowitz_T:p=3,q=1", "--output", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let poly: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(poly["vertices"], serde_json::json!([[0, 0], [3, 0], [0, 1]]));
    assert_eq!(poly["dim"], 2);

    let r = json(&knormal(&["analyze", "--file", path.to_str().unwrap()]));
    assert_eq!(r["vol"], 3);
    assert_eq!(r["n_points"], 5);

    // several polytopes come out as an array and go back in the same way
    let many = dir.path().join("many.json");
    knormal(&["generate", "--family", "standard_simplex:d=1..3", "--output", many.to_str().unwrap()]);
    let r = json(&knormal(&["analyze", "--file", many.to_str().unwrap()]));
    assert_eq!(r.as_array().unwrap().len(), 3);
}

#[test]
fn decompose_delta2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("delta2.json");
    fs::write(&path, r#"{"name":"delta2","dim":2,"vertices":[[0,0],[1,0],[0,1]]}"#).unwrap();
    let p = path.to_str().unwrap();
    let out = knormal(&["decompose", "--file", p, "--k", "2", "--x", "1,1", "--a", "1,0,0"]);
    assert_eq!(out.status.code(), Some(0));
    let c = json(&out);
    assert_eq!(c["parts"].as_array().unwrap().len(), 3);
    assert_eq!(c["target"], serde_json::json!([1, 1]));

    let out = knormal(&["decompose", "--file", p, "--k", "2", "--x", "1,1", "--i", "0"]);
    assert_eq!(out.status.code(), Some(0));

    let out = knormal(&["decompose", "--file", p, "--k", "2", "--x", "3,3", "--a", "1,0,0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(knormal(&["analyze", "--family", "bruns_gubeladze:s=4,bogus=1"]).status.code(), Some(1));
    assert_eq!(knormal(&["analyze", "--family", "bruns_gubeladze:s=3"]).status.code(), Some(1));
    assert_eq!(knormal(&["analyze"]).status.code(), Some(1));
    assert_eq!(knormal(&["frobnicate"]).status.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"dim": 2, "vertices": [[0,0],[1,0]]}"#).unwrap();
    let out = knormal(&["analyze", "--file", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    fs::write(&bad, "not json").unwrap();
    assert_eq!(knormal(&["analyze", "--file", bad.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn cap_hit_exits_2() {
    let out = knormal(&["knormality", "--family", "bruns_gubeladze:s=8", "--k-cap", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let r = json(&out);
    assert_eq!(r["k_p"], Value::Null);
}

#[test]
fn budget_hit_exits_2() {
    let out = knormal(&[
        "decompose", "--family", "dilated_simplex:d=2,c=3", "--k", "3", "--x", "4,4", "--i", "0", "--budget", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn help_documents_inline_syntax() {
    let out = knormal(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("name:key=val,key=val"));
    assert!(text.contains("pyramid_of:l=1:bruns_gubeladze:s=4"));
}

#[test]
fn human_format_carries_json_fields() {
    let j = json(&knormal(&["analyze", "--family", "rabinowitz_T:p=2,q=2"]));
    let h = String::from_utf8(knormal(&["analyze", "--family", "rabinowitz_T:p=2,q=2", "--format", "human"]).stdout).unwrap();
    for (key, label) in [("k_p", "k_P"), ("d_p", "d_P"), ("nu_p", "nu_P"), ("reg", "reg"), ("codim_x", "codim_X")] {
        let line = h.lines().find(|l| l.starts_with(label)).unwrap();
        assert!(line.ends_with(&j[key].to_string()), "{line}");
    }
    assert!(h.contains("seed"));
}

#[test]
fn other_commands() {
    let b = json(&knormal(&["bounds", "--family", "rabinowitz_T:p=3"]));
    let eg = b["bounds"].as_array().unwrap().iter().find(|x| x["id"] == "EG_CONJ").unwrap().clone();
    assert_eq!(eg["holds"], true);

    let h = json(&knormal(&["hilbert", "--family", "pyramid_of:l=1:bruns_gubeladze:s=4"]));
    assert_eq!(h["very_ample"], false);
    assert_eq!(h["cones"].as_array().unwrap().len(), 9);

    let k = json(&knormal(&["knormality", "--family", "dilated_simplex:d=4,c=2"]));
    assert_eq!(k["k_p"], 1);
}

#[test]
fn seeds_are_reproducible() {
    let a = knormal(&["generate", "--family", "random_hnf_simplex:d=3,max_det=30", "--seed", "11"]);
    let b = knormal(&["generate", "--family", "random_hnf_simplex:d=3,max_det=30,seed=11"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(String::from_utf8(a.stderr).unwrap().contains("seed 11"));
}

#[test]
fn batch_rows_in_order() {
    let dir = tempfile::tempdir().unwrap();
    let rows = dir.path().join("rows.csv");
    let summary = dir.path().join("summary.json");
    let out = knormal(&[
        "batch",
        "--family",
        "bruns_gubeladze:s=4..6",
        "--family",
        "rabinowitz_T:p=1..3",
        "--workers",
        "4",
        "--output",
        rows.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&rows).unwrap();
    let prefixes = ["P_4,", "P_5,", "P_6,", "\"T_{1,1}\",", "\"T_{2,1}\",", "\"T_{3,1}\","];
    let lines: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(lines.len(), prefixes.len());
    for (line, prefix) in lines.iter().zip(prefixes) {
        assert!(line.starts_with(prefix), "{line}");
    }
    let s: Value = serde_json::from_str(&fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["instances"], 6);
    assert_eq!(s["violations"].as_array().unwrap().len(), 0);
}
