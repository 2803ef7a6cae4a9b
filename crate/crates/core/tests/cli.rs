use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pskel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pskel")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn verify_cur_reports_flags_and_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "a.txt", "field gf 5\n3 3\n1 2 3\n2 4 1\n3 1 0\n");
    let out = pskel(&["verify", "cur", &file, "--rows", "1,3", "--cols", "1,3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["kind"], "cur");
    assert_eq!(v["field"], "gf 5");
    assert_eq!(v["I"], serde_json::json!([1, 3]));
    assert_eq!(v["ranks"]["a"], 2);
    assert_eq!(v["conditions"]["i"]["value"], true);
    assert_eq!(v["conditions"]["i"]["mode"], "direct");

    // Rank-deficient intersection: every flag false, still consistent.
    let out = pskel(&["verify", "cur", &file, "--rows", "1,2", "--cols", "1,2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["ranks"]["u"], 1);
    assert!(v["conditions"]
        .as_object()
        .unwrap()
        .values()
        .all(|f| f["value"] == false));
}

#[test]
fn text_format_and_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "a.txt", "field rational\n2 2\n1 1/2\n2 1\n");
    let report = dir.path().join("r.txt");
    let out = pskel(&[
        "verify",
        "cur",
        &file,
        "--auto-indices",
        "--format",
        "text",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(report).unwrap();
    assert!(text.starts_with("cur over rational, 2x2"), "{text}");
    assert!(text.trim_end().ends_with("consistent"));
}

#[test]
fn errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "field gf 5\n2 2\n1 2\n3\n");
    let out = pskel(&["verify", "cur", &bad, "--auto-indices"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let good = write(dir.path(), "a.txt", "field gf 5\n2 2\n1 2\n3 4\n");
    for args in [
        vec!["verify", "cur", &good],
        vec!["verify", "cur", &good, "--rows", "1,5", "--cols", "1"],
        vec!["verify", "cur", &good, "--auto-indices", "--samples", "0"],
        vec!["verify", "tcur", &good, "--auto-indices"],
        vec!["geninv", &good, "--mp"],
        vec!["gen", "--field", "gf 6", "--shape", "2x2"],
        vec!["gen", "--field", "real", "--shape", "2x2", "--rank", "3"],
        vec!["verify", "cur", "/does/not/exist"],
        vec!["bogus"],
    ] {
        assert_eq!(pskel(&args).status.code(), Some(2), "{args:?}");
    }
    assert_eq!(pskel(&["--help"]).status.code(), Some(0));
}

#[test]
fn geninv_examples() {
    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "e.txt", "field gf 2\n2 2\n1 0\n0 0\n");
    let out = pskel(&["geninv", &file, "--enumerate"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["count"], "8");
    let listed = v["enumerated"].as_array().unwrap();
    assert_eq!(listed.len(), 8);
    assert!(listed.iter().all(|m| m[0][0] == "1"));

    let file = write(dir.path(), "r.txt", "field real\n2 2\n1 2\n2 4\n");
    let v = json(&pskel(&["geninv", &file, "--mp", "--samples", "3"]));
    assert_eq!(v["moore_penrose"]["mp"], serde_json::json!([1, 2, 3, 4]));
    let p: f64 = v["moore_penrose"]["inverse"][0][0].as_str().unwrap().parse().unwrap();
    assert!((p - 0.04).abs() < 1e-12);
    assert_eq!(v["samples"].as_array().unwrap().len(), 3);

    let file = write(dir.path(), "n.txt", "field rational\n2 2\n0 1\n0 0\n");
    let v = json(&pskel(&["geninv", &file, "--drazin"]));
    assert_eq!(v["drazin"]["index"], 2);
    assert_eq!(v["drazin"]["axioms"], true);
    assert_eq!(v["drazin"]["inverse"], serde_json::json!([["0", "0"], ["0", "0"]]));
}

#[test]
fn tensor_verification_with_explicit_indices() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.txt");
    let file = file.to_str().unwrap();
    let out = pskel(&[
        "gen", "--field", "gf 7", "--shape", "3x4x5", "--mlrank", "2,2,2", "--seed", "8", "--out", file,
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "multilinear rank (2,2,2)");

    // A single row in the first mode cannot carry rank 2.
    let out = pskel(&[
        "verify", "chidori", file, "--rows", "1", "--rows", "all", "--rows", "all",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["conditions"]["i"]["value"], false);
    assert_eq!(v["converse_tested"], false);

    let out = pskel(&[
        "verify", "chidori", file, "--rows", "all", "--rows", "all", "--rows", "all",
    ]);
    let v = json(&out);
    assert_eq!(v["conditions"]["iii"]["value"], true);

    let out = pskel(&["verify", "fiber", file, "--rows", "all", "--rows", "all"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn trials_run_in_seed_order() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("c.txt");
    let file = file.to_str().unwrap();
    pskel(&[
        "gen", "--field", "complex", "--shape", "5x6", "--rank", "2", "--seed", "1", "--out", file,
    ]);
    let v = json(&pskel(&[
        "verify",
        "cur",
        file,
        "--auto-indices",
        "--trials",
        "4",
        "--seed",
        "10",
    ]));
    let seeds: Vec<u64> = v["trials"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, [10, 11, 12, 13]);
    assert_eq!(v["schema"], 1);
}
