use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn latdioph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latdioph"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = latdioph(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is one JSON report")
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("latdioph-cli-{}-{name}", std::process::id()))
}

const L1: &str = r#"{"kind":"lp","p":"1"}"#;
const C0: &str = r#"{"kind":"c0"}"#;

#[test]
fn space_info_c0() {
    let r = report(&["space", "info", "--space", C0]);
    let want: Value = serde_json::from_str(
        r#"{"epsilon_lambda":"1","codiameter":"1/2","cobounded":true,"strongly_discrete":false}"#,
    )
    .unwrap();
    assert_eq!(r["results"], want);
    assert_eq!(r["invariant_violation"], false);
    assert_eq!(r["config"]["command"], "space info");
    assert!(r["version"].is_string());
}

#[test]
fn counterexample_rows() {
    let r = report(&["optimality", "counterexample", "--n-max", "2"]);
    let rows = r["results"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let qs: Vec<&str> = rows.iter().map(|row| row["q"].as_str().unwrap()).collect();
    assert_eq!(qs, ["16", "256", "65536", "4294967296"]);
    for row in rows {
        assert_eq!(row["phi_q3"], "1");
    }
}

#[test]
fn wa_chain_and_witnesses() {
    let r = report(&[
        "construct", "wa", "--psi", "pow:1", "--levels", "3", "--choices", "1,2,3", "--space", L1,
    ]);
    let q: Vec<&str> = r["results"]["schedule"]["q"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(q, ["1", "6", "36", "216"]);
    let ws = r["results"]["witnesses"].as_array().unwrap();
    assert_eq!(ws.len(), 2);
    assert!(ws.iter().all(|w| w["bound"]["holds"] == true));
    assert_eq!(ws[0]["dist"]["value"], "7/216");
}

#[test]
fn best_approximation() {
    let r = report(&[
        "approx",
        "best",
        "--space",
        r#"{"kind":"fin","d":1,"p":"inf"}"#,
        "--point",
        r#"{"entries":[[1,"13/21"]]}"#,
        "--max-height",
        "10",
    ]);
    assert_eq!(r["results"]["r"]["entries"][0][1], "5/8");
    assert_eq!(r["results"]["dist"]["value"], "1/168");
}

#[test]
fn seeded_runs_are_byte_identical() {
    let runs = [
        vec!["claims", "--mode", "noncobounded", "--space", L1, "--psi", "pow:3", "--n", "2", "--trials", "40", "--seed", "11"],
        vec!["transversality", "--mode", "cobounded", "--space", C0, "--levels", "2", "--trials", "50", "--seed", "5"],
        vec!["construct", "ba", "--mode", "cobounded", "--space", C0, "--levels", "2", "--seed", "9"],
    ];
    for args in &runs {
        let a = latdioph(args);
        let b = latdioph(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
    let other = latdioph(&["construct", "ba", "--mode", "cobounded", "--space", C0, "--levels", "2", "--seed", "10"]);
    assert_ne!(other.stdout, latdioph(&runs[2]).stdout);
}

#[test]
fn echoed_config_reproduces_the_report() {
    let first = latdioph(&[
        "approx",
        "certify",
        "--space",
        r#"{"p":"inf","kind":"fin","d":1}"#,
        "--point",
        r#"{"entries":[[1,"13/21"]]}"#,
        "--psi",
        "powlog:1,2,0",
        "--window",
        "1:20",
    ]);
    assert!(first.status.success());
    let r: Value = serde_json::from_slice(&first.stdout).unwrap();
    // normalized on the way in
    assert_eq!(r["config"]["psi"], "pow:2");
    assert_eq!(r["results"]["min_ratio"]["value"], "8/21");
    let cfg = scratch("certify.json");
    std::fs::write(&cfg, serde_json::to_string(&r["config"]).unwrap()).unwrap();
    let again = latdioph(&["run", "--config", cfg.to_str().unwrap()]);
    std::fs::remove_file(&cfg).ok();
    assert!(again.status.success());
    assert_eq!(first.stdout, again.stdout);
}

#[test]
fn output_file_holds_the_stdout_report() {
    let out = scratch("space.json");
    let to_file = latdioph(&["space", "info", "--space", L1, "--output", out.to_str().unwrap()]);
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    let written = std::fs::read(&out).unwrap();
    std::fs::remove_file(&out).ok();
    assert_eq!(written, latdioph(&["space", "info", "--space", L1]).stdout);
}

#[test]
fn usage_errors_exit_with_one() {
    let cases: &[&[&str]] = &[
        &["approx", "best", "--space", C0, "--max-height", "5"],
        &["space", "info", "--space", C0, "--psi", "pow:1"],
        &["space", "info", "--space", r#"{"kind":"torus"}"#],
        &["space", "info", "--colour", "red"],
        &["growth", "compare", "--psi", "pow:1", "--phi", "exp:1"],
        &["claims", "--mode", "sideways", "--space", C0, "--n", "1", "--trials", "3"],
        &["construct", "ba", "--mode", "noncobounded", "--space", L1, "--psi", "pow:3", "--levels", "3", "--cap-bits", "64"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = latdioph(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
    assert_eq!(latdioph(&["--help"]).status.code(), Some(0));
}

#[test]
fn unknown_config_fields_are_usage_errors() {
    let cfg = scratch("bad.json");
    std::fs::write(&cfg, r#"{"command":"space info","space":{"kind":"c0"},"colour":"red"}"#).unwrap();
    let out = latdioph(&["run", "--config", cfg.to_str().unwrap()]);
    std::fs::remove_file(&cfg).ok();
    assert_eq!(out.status.code(), Some(1));

    let cfg = scratch("unknown-command.json");
    std::fs::write(&cfg, r#"{"command":"space volume"}"#).unwrap();
    let out = latdioph(&["run", "--config", cfg.to_str().unwrap()]);
    std::fs::remove_file(&cfg).ok();
    assert_eq!(out.status.code(), Some(1));
}
