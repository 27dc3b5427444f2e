use std::path::Path;
use std::process::{Command, Output};

use gring_core::derivation::inner_derivation;
use gring_core::{Group, RingElement};
use serde_json::Value;

fn gring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gring"))
        .args(args)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn ball_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("ball.csv");
    let out = gring(&[
        "ball",
        "--group",
        "dihedral:4",
        "--radius",
        "4",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "element,length");
    assert_eq!(lines.len(), 1 + 8);
    assert_eq!(lines[1], "e,0");
}

#[test]
fn central_derivation_on_integers_has_a_witness() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let run = |p: &Path| {
        gring(&[
            "classify",
            "--group",
            "abelian:1",
            "--derivation",
            "central:e;x=1",
            "--dom-radius",
            "16",
            "--json",
            p.to_str().unwrap(),
        ])
    };
    assert_eq!(code(&run(&a)), 2);
    assert_eq!(code(&run(&b)), 2);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let report = read_json(&a);
    assert_eq!(report["schema"], 1);
    assert_eq!(report["loop_triviality"]["quasi_inner"], false);
    assert_eq!(report["cross_check"]["fired"], false);
    let ratios: Vec<f64> = report["witness"]["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["ratio"].as_f64().unwrap())
        .collect();
    assert_eq!(ratios, (1..=16).map(f64::from).collect::<Vec<_>>());
}

#[test]
fn inner_derivation_is_quasi_inner() {
    let out = gring(&[
        "classify",
        "--group",
        "free:2",
        "--derivation",
        "inner:x - y",
        "--norm",
        "lp:2",
        "--radius",
        "2",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("quasi-inner"));
}

#[test]
fn witness_on_finite_group_finds_nothing() {
    let out = gring(&[
        "witness",
        "--group",
        "symmetric:3",
        "--character",
        "inner:s1 - s2",
    ]);
    assert_eq!(code(&out), 0);
    let out = gring(&[
        "witness",
        "--group",
        "abelian:1",
        "--character",
        "central:e;x=1",
        "--length",
        "4",
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn probe_reports_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("probe.json");
    let args = |norm: &'static str| {
        vec![
            "probe".to_string(),
            "--group".into(),
            "free:2".into(),
            "--derivation".into(),
            "central:e;x=1".into(),
            "--norm".into(),
            norm.into(),
            "--radius".into(),
            "6".into(),
            "--json".into(),
            json.to_str().unwrap().into(),
        ]
    };
    let run = |norm| {
        let a = args(norm);
        gring(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(code(&run("expw:2")), 0);
    assert_eq!(read_json(&json)["verdict"], "stabilizing");
    assert_eq!(code(&run("expw:0.5")), 0);
    assert_eq!(read_json(&json)["verdict"], "not-stabilizing");
    assert_eq!(code(&run("sup")), 1);
}

#[test]
fn corrupted_table_fails_leibniz() {
    let g = Group::from_spec_str("free:2").unwrap();
    let mut d = inner_derivation(&g, &RingElement::parse("x", &g).unwrap(), 4).unwrap();
    let y = g.parse("y").unwrap();
    let bad = d
        .get(&y)
        .unwrap()
        .add(&RingElement::parse("y*x", &g).unwrap());
    d.set_value(y, bad).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.json");
    std::fs::write(&path, d.to_json(&g).to_string()).unwrap();
    let spec = format!("table:@{}", path.display());
    let out = gring(&[
        "leibniz",
        "--group",
        "free:2",
        "--derivation",
        &spec,
        "--radius",
        "2",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("worst pair"));

    let out = gring(&[
        "leibniz",
        "--group",
        "free:2",
        "--derivation",
        "inner:x",
        "--radius",
        "2",
    ]);
    assert_eq!(code(&out), 0);
}

#[test]
fn norms_report_subordination() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("n.json");
    let out = gring(&[
        "norms",
        "--group",
        "free:2",
        "--norm",
        "expw:1",
        "--radius",
        "5",
        "--json",
        json.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let report = read_json(&json);
    assert_eq!(report["subordinate"], false);
    let last = report["witness"].as_array().unwrap().last().unwrap()["ratio"]
        .as_f64()
        .unwrap();
    assert!((last - 5f64.exp()).abs() < 1e-9 * 5f64.exp());
}

#[test]
fn bad_input_exits_with_one() {
    let out = gring(&["ball", "--group", "lie:3"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = gring(&[
        "classify",
        "--group",
        "free:2",
        "--derivation",
        "central:x;x=1",
    ]);
    assert_eq!(code(&out), 1);
}
