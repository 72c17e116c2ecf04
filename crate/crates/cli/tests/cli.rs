use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const Z2: &str = r#"{"degree": 2, "coefficients": [[1, 0]]}"#;
const FIVE: &str = r#"{"degree": 5, "homoclinics": [[1, 2], [5, 4], [7, 6]], "landing": {"0": 0, "3": 1}}"#;
const CUBIC: &str = r#"{"degree": 3, "homoclinics": [[1, 0]], "landing": {"2": 0, "3": 1}}"#;
const WRAP: &str = r#"{"degree": 10,
  "homoclinics": [[7, 0], [1, 2], [5, 6], [9, 8], [11, 10], [17, 12], [13, 16]],
  "landing": {"3": 0, "4": 0, "14": 1, "15": 1}}"#;

fn polyflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyflow")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn broken(events: &Value) -> Vec<Vec<(u64, u64)>> {
    events["events"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["broken"].as_array().unwrap().iter().map(|p| (p[0].as_u64().unwrap(), p[1].as_u64().unwrap())).collect())
        .collect()
}

#[test]
fn analyze_z2_plus_1() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", Z2);
    let o = polyflow(&["analyze", s(&p)]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let h = &v["model"]["homoclinics"][0];
    assert_eq!((h[0].as_u64(), h[1].as_u64()), (Some(1), Some(0)));
    assert!((h[2].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-6);
    assert!((v["invariants"]["taus"][0].as_f64().unwrap() - std::f64::consts::PI).abs() < 1e-6);

    let out = dir.path().join("out");
    assert_eq!(polyflow(&["analyze", s(&p), "--out", s(&out)]).status.code(), Some(0));
    assert!(out.join("diskmodel.json").exists() && out.join("invariants.json").exists());
}

#[test]
fn bad_polynomials_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"degree": 2, "coeff"#);
    assert_eq!(polyflow(&["analyze", s(&bad)]).status.code(), Some(2));
    let linear = write(&dir, "lin.json", r#"{"degree": 1, "coefficients": []}"#);
    assert_eq!(polyflow(&["analyze", s(&linear)]).status.code(), Some(2));
    let missing = dir.path().join("nope.json");
    assert_eq!(polyflow(&["analyze", s(&missing)]).status.code(), Some(2));
}

#[test]
fn analyze_output_is_byte_stable() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", r#"{"degree": 4, "coefficients": [[0.3, -0.2], [0.1, 0.5], [-0.4, 0.05]]}"#);
    let a = polyflow(&["analyze", s(&p)]);
    let b = polyflow(&["analyze", s(&p)]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn enumerate_counts() {
    let dir = TempDir::new().unwrap();
    let cubic = write(&dir, "c.json", CUBIC);
    let o = polyflow(&["enumerate", s(&cubic)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(broken(&json(&o)).len(), 2);

    let empty = write(&dir, "e.json", r#"{"degree": 2, "homoclinics": [], "landing": {"0": 0, "1": 0}}"#);
    let o = polyflow(&["enumerate", s(&empty)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(broken(&json(&o)).is_empty());
}

#[test]
fn enumerate_covers_every_edge() {
    let dir = TempDir::new().unwrap();
    let wrap = write(&dir, "w.json", WRAP);
    let o = polyflow(&["enumerate", s(&wrap)]);
    assert_eq!(o.status.code(), Some(0));
    let b = broken(&json(&o));
    for pair in [[(5, 6), (1, 2)], [(7, 0), (17, 12)], [(17, 12), (7, 0)], [(13, 16), (17, 12)]] {
        assert!(b.contains(&pair.to_vec()), "{pair:?}");
    }
    assert!(!b.contains(&vec![(1, 2), (5, 6)]));
    let two = b.iter().filter(|x| x.len() == 2).count();
    assert_eq!(two, 17);
}

#[test]
fn invalid_model_exits_4() {
    let dir = TempDir::new().unwrap();
    let crossing = write(&dir, "x.json", r#"{"degree": 4, "homoclinics": [[1, 4], [3, 0]], "landing": {"2": 0, "5": 1}}"#);
    assert_eq!(polyflow(&["enumerate", s(&crossing)]).status.code(), Some(4));
}

#[test]
fn analyze_feeds_enumerate_and_verify() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", Z2);
    let out = dir.path().join("a");
    assert_eq!(polyflow(&["analyze", s(&p), "--out", s(&out)]).status.code(), Some(0));
    let events = dir.path().join("events.json");
    let o = polyflow(&["enumerate", s(&out.join("diskmodel.json")), "--out", s(&events)]);
    assert_eq!(o.status.code(), Some(0));
    for i in ["0", "1"] {
        let o = polyflow(&["verify", s(&p), i, "--events", s(&events)]);
        assert_eq!(o.status.code(), Some(0));
        assert_eq!(json(&o)["match"], Value::Bool(true));
    }
}

#[test]
fn verify_rejects_bad_requests() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", Z2);
    let o = polyflow(&["verify", s(&p), "0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(polyflow(&["verify", s(&p), "9"]).status.code(), Some(2));
    let corrupt = write(&dir, "ev.json", r#"{"events": [{"broken": [[1, 0]], "formed": [], "rank": 1, "sign": "?", "landing": {"j1": 0, "kn": 1}}]}"#);
    assert_eq!(polyflow(&["verify", s(&p), "0", "--events", s(&corrupt)]).status.code(), Some(2));
    let foreign = write(&dir, "fe.json", r#"{"events": [{"broken": [[3, 0]], "formed": [], "rank": 1, "sign": "+", "landing": {"j1": 0, "kn": 1}}]}"#);
    assert_eq!(polyflow(&["verify", s(&p), "0", "--events", s(&foreign)]).status.code(), Some(2));
}

#[test]
fn disk_plot_counts() {
    let dir = TempDir::new().unwrap();
    let m = write(&dir, "m.json", FIVE);
    let o = polyflow(&["plot", s(&m)]);
    assert_eq!(o.status.code(), Some(0));
    let svg = String::from_utf8(o.stdout).unwrap();
    assert!(svg.contains("version=\"1.1\""));
    let count = |c: &str| svg.matches(&format!("class=\"{c}\"")).count();
    assert_eq!(count("label"), 8);
    assert_eq!(count("chord"), 3);
    assert_eq!(count("landing"), 2);
    assert_eq!(count("transversal"), 1);
    assert!(svg.contains("stroke-dasharray"));

    let none = write(&dir, "n.json", r#"{"degree": 3, "homoclinics": [], "landing": {"0": 0, "2": 0, "1": 1, "3": 2}}"#);
    let o = polyflow(&["plot", s(&none)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!String::from_utf8(o.stdout).unwrap().contains("class=\"chord\""));
}

#[test]
fn phase_plot_highlights_the_real_axis() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "p.json", Z2);
    let o = polyflow(&["plot", s(&p), "--mode", "phase", "--density", "5", "--size", "400"]);
    assert_eq!(o.status.code(), Some(0));
    let svg = String::from_utf8(o.stdout).unwrap();
    let line = svg.lines().find(|l| l.starts_with("<polyline class=\"homoclinic\"")).expect("homoclinic drawn");
    let pts = line.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    for xy in pts.split(' ') {
        let y: f64 = xy.split(',').nth(1).unwrap().parse().unwrap();
        assert!((y - 200.0).abs() < 0.01);
    }
    assert_eq!(svg.matches("class=\"stream\"").count(), 25);
}

#[test]
fn plot_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "b.json", "[1, 2");
    assert_eq!(polyflow(&["plot", s(&bad)]).status.code(), Some(2));
    let m = write(&dir, "m.json", FIVE);
    assert_eq!(polyflow(&["plot", s(&m), "--mode", "phase"]).status.code(), Some(2));
    assert_eq!(polyflow(&["plot", s(&m), "--density", "0"]).status.code(), Some(2));
}

#[test]
fn decompose_rank_two() {
    let dir = TempDir::new().unwrap();
    let from = write(&dir, "from.json", r#"{"degree": 8, "homoclinics": [[3, 8], [5, 4], [9, 0], [13, 12]],
        "landing": {"1": 0, "2": 0, "6": 1, "7": 1, "10": 2, "11": 2}}"#);
    let to = write(&dir, "to.json", r#"{"degree": 8, "homoclinics": [[3, 0], [5, 12]],
        "landing": {"1": 0, "2": 0, "4": 3, "6": 1, "7": 1, "8": 1, "9": 2, "10": 2, "11": 2, "13": 4}, "counts": {"N": 5}}"#);
    let o = polyflow(&["decompose-rank", s(&from), s(&to)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(broken(&json(&o)).len(), 2);
}
