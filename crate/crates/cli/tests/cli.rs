use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use manta_core::geometry::points_cross;
use manta_core::io::{parse_trace, parse_triangulation};
use manta_core::PropositionReport;
use tempfile::TempDir;

fn manta(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_manta")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn generate_t4(dir: &TempDir) -> PathBuf {
    let o = manta(&["generate", "--n", "4", "--omega", "0.78pi", "--out", "t4.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    dir.path().join("t4.json")
}

/// Edges of the file's triangulation that cross the segment between two
/// labelled vertices, counted directly from coordinates.
fn crossings(path: &Path, u: &str, v: &str) -> usize {
    let f = parse_triangulation(&std::fs::read_to_string(path).unwrap()).unwrap();
    let t = f.to_triangulation().unwrap();
    let (a, b) = (t.point(f.resolve(u).unwrap()), t.point(f.resolve(v).unwrap()));
    t.edges().filter(|e| points_cross(&a, &b, &t.point(e.lo), &t.point(e.hi))).count()
}

#[test]
fn generate_writes_t4() {
    let dir = TempDir::new().unwrap();
    let path = generate_t4(&dir);
    let f = parse_triangulation(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(f.points.len(), 12);
    assert_eq!(f.to_triangulation().unwrap().num_edges(), 21);
    let labels = f.labels.unwrap();
    assert_eq!(labels["O"], 0);
    assert_eq!(labels["P"], 11);
}

#[test]
fn generate_defaults_to_stdout() {
    let dir = TempDir::new().unwrap();
    let o = manta(&["generate", "--n", "1"], dir.path());
    assert_eq!(code(&o), 0);
    let f = parse_triangulation(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(f.points.len(), 6);
}

#[test]
fn generate_rejects_small_omega() {
    let dir = TempDir::new().unwrap();
    let o = manta(&["generate", "--n", "2", "--omega", "0.5pi"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("claim inequality (iii) violated"), "{}", stderr(&o));
    assert!(stderr(&o).contains("claim inequality (iv) violated"));
}

#[test]
fn optimize_t4_inserts_op() {
    let dir = TempDir::new().unwrap();
    let t4 = generate_t4(&dir);
    let o = manta(&["optimize", "t4.json", "--out", "fan.json", "--trace", "trace.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let stdout = String::from_utf8(o.stdout).unwrap();
    assert!(stdout.contains("measure before:") && stdout.contains("rad)"));
    let trace = parse_trace(&std::fs::read_to_string(dir.path().join("trace.json")).unwrap()).unwrap();
    let op = trace.iter().find(|e| e.insert == [0, 11]).expect("O-P inserted");
    assert_eq!(op.crossings, crossings(&t4, "O", "P"));
    // the result is the fan from P
    let fan = parse_triangulation(&std::fs::read_to_string(dir.path().join("fan.json")).unwrap()).unwrap();
    let t = fan.to_triangulation().unwrap();
    assert_eq!(t.neighbors(11).len(), 11);
}

#[test]
fn optimize_three_points_gives_empty_trace() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("tri.txt"), "# a triangle\n0 0\n1 0\n0 1\n").unwrap();
    let o = manta(&["optimize", "tri.txt", "--trace", "trace.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(parse_trace(&std::fs::read_to_string(dir.path().join("trace.json")).unwrap()).unwrap().is_empty());
}

#[test]
fn optimize_matches_oracle_on_random_sets() {
    let dir = TempDir::new().unwrap();
    let o = manta(&["oracle", "--random", "100", "--points", "7", "--seed", "1000", "--format", "json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rows.len(), 100);
    assert!(rows.iter().all(|r| r["matches"] == true));
}

#[test]
fn verify_range_passes() {
    let dir = TempDir::new().unwrap();
    let o = manta(&["verify", "--n", "1..10", "--out", "reports.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let reports: Vec<PropositionReport> =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("reports.json")).unwrap()).unwrap();
    assert_eq!(reports.len(), 10);
    assert!(reports.iter().all(|r| r.verdict));
}

#[test]
fn verify_outside_regime_fails() {
    let dir = TempDir::new().unwrap();
    let o = manta(&["verify", "--n", "5", "--omega", "0.70pi"], dir.path());
    assert!([2, 4].contains(&code(&o)), "exit {}", code(&o));
    assert!(stderr(&o).contains("claim inequality"));
}

#[test]
fn verify_perturbed() {
    let dir = TempDir::new().unwrap();
    let o = manta(&["verify", "--n", "1", "--perturb", "1e-6", "--seed", "7", "--format", "json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let reports: Vec<PropositionReport> = serde_json::from_slice(&o.stdout).unwrap();
    assert!(reports[0].verdict);
}

#[test]
fn render_highlights_the_channel() {
    let dir = TempDir::new().unwrap();
    let t4 = generate_t4(&dir);
    let o = manta(&["render", "t4.json", "--highlight", "O,P", "--labels", "--out", "t4.svg"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let svg = std::fs::read_to_string(dir.path().join("t4.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="inserted""#).count(), 1);
    assert_eq!(svg.matches(r#"class="crossed""#).count(), crossings(&t4, "O", "P"));
    assert_eq!(svg.matches("<polygon").count(), 2);
    assert!(svg.contains(">P</text>"));
}

#[test]
fn render_consumes_optimize_output() {
    let dir = TempDir::new().unwrap();
    generate_t4(&dir);
    assert_eq!(code(&manta(&["optimize", "t4.json", "--out", "fan.json"], dir.path())), 0);
    let o = manta(&["render", "fan.json", "--labels"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let svg = String::from_utf8(o.stdout).unwrap();
    assert_eq!(svg.matches("<line").count(), 21);
}

#[test]
fn render_single_triangle() {
    let dir = TempDir::new().unwrap();
    std::fs::write(dir.path().join("t.json"), r#"{"points": [[0,0],[1,0],[0,1]], "triangles": [[0,1,2]]}"#).unwrap();
    let o = manta(&["render", "t.json"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let svg = String::from_utf8(o.stdout).unwrap();
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert_eq!(svg.matches("<line").count(), 3);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&manta(&["frobnicate"], dir.path())), 1);
    assert_eq!(code(&manta(&["verify", "--n", "5..2"], dir.path())), 1);
    assert_eq!(code(&manta(&["optimize", "missing.json"], dir.path())), 3);
    std::fs::write(dir.path().join("bad.json"), r#"{"points": [[0,0],[1,0],[1,1],[0,1]], "triangles": [[0,1,2]]}"#)
        .unwrap();
    let o = manta(&["optimize", "bad.json"], dir.path());
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("invalid"));
    assert_eq!(code(&manta(&["render", "bad.json"], dir.path())), 3);
    std::fs::write(dir.path().join("pts.txt"), "0 0\n1 oops\n").unwrap();
    assert_eq!(code(&manta(&["optimize", "pts.txt"], dir.path())), 3);
}
