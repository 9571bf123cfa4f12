//! End-to-end runs of the `citerank` binary.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn citerank(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_citerank"))
        .args(args)
        .arg("--out")
        .arg(out)
        .arg("--no-timestamp")
        .env_remove("CITERANK_OUT")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], out: &Path) {
    let o = citerank(args, out);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
}

/// Data rows of a metadata-prefixed CSV as header-keyed maps.
fn read_table(path: &Path) -> Vec<HashMap<String, String>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .unwrap();
    let header = r.headers().unwrap().clone();
    r.records()
        .map(|rec| {
            header
                .iter()
                .zip(rec.unwrap().iter())
                .map(|(h, v)| (h.to_string(), v.to_string()))
                .collect()
        })
        .collect()
}

fn tie_fixture(dir: &TempDir) -> String {
    let path = dir.path().join("ties.csv");
    let mut text = String::from("id,citations,group\n");
    for (i, c) in [9, 8, 7, 6, 5, 5, 5, 3, 2, 0].iter().enumerate() {
        let group = if i == 5 { "A" } else { "" };
        text.push_str(&format!("p{i},{c},{group}\n"));
    }
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn indicators_on_the_tie_fixture() {
    let dir = TempDir::new().unwrap();
    let input = tie_fixture(&dir);
    let out = dir.path().join("out");
    ok(&["indicators", "--input", &input], &out);
    let rows = read_table(&out.join("indicators.csv"));
    let global = rows.iter().find(|r| r["group"] == "GLOBAL").unwrap();
    assert_eq!(global["P"], "10");
    assert_eq!(global["P_top50"], "5.000");
    assert_eq!(global["P_top10"], "1.000");
    let a = rows.iter().find(|r| r["group"] == "A").unwrap();
    assert_eq!(a["P_top50"], "0.333");
    assert_eq!(a["P_top10"], "0.000");
    assert_eq!(a["R3"], "N/C");
}

#[test]
fn output_files_carry_metadata() {
    let dir = TempDir::new().unwrap();
    let input = tie_fixture(&dir);
    let out = dir.path().join("out");
    ok(&["indicators", "--input", &input], &out);
    let text = fs::read_to_string(out.join("indicators.csv")).unwrap();
    assert!(text.starts_with("# tool: citerank "));
    assert!(text.contains("# config_digest: "));
    assert!(text.contains("# tie_policy: mean"));
    assert!(!text.contains("generated_at"));

    let stamped = dir.path().join("stamped");
    let o = Command::new(env!("CARGO_BIN_EXE_citerank"))
        .args(["indicators", "--input", &input, "--format", "json", "--out"])
        .arg(&stamped)
        .output()
        .unwrap();
    assert!(o.status.success());
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(stamped.join("indicators.json")).unwrap()).unwrap();
    assert!(json["metadata"]["generated_at"].is_string());
    assert!(json["data"].is_array());
}

#[test]
fn classify_precomputed_ratios() {
    let dir = TempDir::new().unwrap();
    let input = dir.path().join("ratios.csv");
    fs::write(
        &input,
        "institution,country,field,R1,R2,R3\n\
         Harvard University,United States,PE,0.254,0.221,0.170\n\
         Nagoya University,Japan,PE,0.073,0.081,0.120\n\
         Florida State University,United States,PE,0.124,0.121,0.130\n",
    )
    .unwrap();
    let out = dir.path().join("out");
    ok(
        &["classify", "--input", input.to_str().unwrap(), "--ratios"],
        &out,
    );
    let rows = read_table(&out.join("assessments.csv"));
    let kind = |name: &str| rows.iter().find(|r| r["institution"] == name).unwrap()["type"].clone();
    assert_eq!(kind("Harvard University"), "B");
    assert_eq!(kind("Nagoya University"), "C");
    assert_eq!(kind("Florida State University"), "A");

    let summary = read_table(&out.join("country_summary.csv"));
    let us = summary
        .iter()
        .find(|r| r["field"] == "PE" && r["country"] == "United States")
        .unwrap();
    assert_eq!((us["type_a"].as_str(), us["type_b"].as_str()), ("1", "1"));

    let again = dir.path().join("again");
    let assessments = out.join("assessments.csv");
    ok(
        &["summary", "--input", assessments.to_str().unwrap()],
        &again,
    );
    assert_eq!(read_table(&again.join("country_summary.csv")), summary);
}

#[test]
fn synth_then_analyse() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("synth");
    ok(
        &[
            "synth",
            "--global-size",
            "20000",
            "--group-size",
            "400",
            "--seed",
            "3",
        ],
        &out,
    );
    let corpus = out.join("corpus.csv");
    assert_eq!(read_table(&corpus).len(), 20_000);
    let c = corpus.to_str().unwrap();
    let dr = dir.path().join("dr");
    ok(&["doublerank", "--input", c, "--group", "SYN"], &dr);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dr.join("deviation_SYN.json")).unwrap()).unwrap();
    assert_eq!(report["data"]["deviation"]["verdict"], "conforming");
    let hist = dir.path().join("hist");
    ok(&["histogram", "--input", c, "--fit"], &hist);
    assert!(hist.join("histogram_GLOBAL.csv").exists());
    assert!(hist.join("lower_tail_GLOBAL.json").exists());
}

fn exit_code(args: &[&str]) -> i32 {
    let dir = TempDir::new().unwrap();
    citerank(args, dir.path()).status.code().unwrap()
}

#[test]
fn exit_codes_by_error_class() {
    let dir = TempDir::new().unwrap();
    let good = tie_fixture(&dir);
    let negative = dir.path().join("neg.csv");
    fs::write(&negative, "id,citations,group\na,3,X\nb,-1,X\n").unwrap();
    let missing = dir.path().join("nope.csv");

    assert_eq!(exit_code(&["indicators"]), 2);
    assert_eq!(
        exit_code(&["indicators", "--input", &good, "--group", "ZZ"]),
        2
    );
    assert_eq!(
        exit_code(&["indicators", "--input", negative.to_str().unwrap()]),
        3
    );
    assert_eq!(
        exit_code(&["doublerank", "--input", &good, "--group", "A"]),
        4
    );
    assert_eq!(
        exit_code(&["indicators", "--input", missing.to_str().unwrap()]),
        6
    );
}

#[test]
fn parse_errors_name_the_row() {
    let dir = TempDir::new().unwrap();
    let negative = dir.path().join("neg.csv");
    fs::write(&negative, "id,citations,group\na,3,X\nb,-1,X\n").unwrap();
    let o = citerank(
        &["indicators", "--input", negative.to_str().unwrap()],
        dir.path(),
    );
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 3"), "{err}");
}

#[test]
fn histogram_with_explicit_model() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("synth");
    ok(
        &[
            "synth",
            "--global-size",
            "5000",
            "--group-size",
            "100",
            "--seed",
            "2",
        ],
        &out,
    );
    let corpus = out.join("corpus.csv");
    let c = corpus.to_str().unwrap();
    let hist = dir.path().join("hist");
    ok(&["histogram", "--input", c, "--model", "3,1.1"], &hist);
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(hist.join("lower_tail_GLOBAL.json")).unwrap()).unwrap();
    assert!(report["data"].is_object());
    assert_eq!(exit_code(&["histogram", "--input", c, "--model", "3"]), 2);
}
