//! End-to-end tests of the command-line interface: output formats, file
//! round-trips, the exit-code contract, and report determinism.

use std::path::Path;
use std::process::{Command, Output};

fn gammak0(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gammak0"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

fn build_graph(spec: &str, path: &Path) -> Output {
    gammak0(&["build", spec, "-o", path.to_str().unwrap()])
}

#[test]
fn build_reports_counts_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let out = build_graph("Z/2", &path);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("core vertices: 13"), "{text}");
    assert!(text.contains("tail anchors: 3"), "{text}");
    let written = std::fs::read_to_string(&path).unwrap();
    assert!(written.contains("\"group_spec\":\"Z/2\""));
}

#[test]
fn build_trivial_group() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g0.json");
    let out = build_graph("0", &path);
    assert!(out.status.success());
    assert!(stdout(&out).contains("core vertices: 5"));
}

#[test]
fn build_infinite_group_without_window_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("z.json");
    let out = build_graph("Z", &path);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("infinite"));
    assert!(!path.exists());
}

#[test]
fn build_bad_spec_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let out = build_graph("Z/1", &path);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("position"));
}

#[test]
fn k0_of_order_six_graph() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g6.json");
    assert!(build_graph("Z/6", &path).status.success());
    let out = gammak0(&["k0", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("K0: Z/6"), "{}", stdout(&out));
}

#[test]
fn k0_with_truncation_keeps_free_defect() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g2.json");
    assert!(build_graph("Z/2", &path).status.success());
    let out = gammak0(&["k0", path.to_str().unwrap(), "--truncate", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("K0: Z^3 x Z/2"), "{}", stdout(&out));
}

#[test]
fn k0_of_empty_graph_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, r#"{"vertices":[],"edges":[],"loops":{},"tails":[]}"#).unwrap();
    let out = gammak0(&["k0", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("K0: Z^0"), "{}", stdout(&out));
}

#[test]
fn k0_class_table_is_printed_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g2.json");
    assert!(build_graph("Z/2", &path).status.success());
    let out = gammak0(&["k0", path.to_str().unwrap(), "--classes"]);
    let text = stdout(&out);
    assert!(text.contains("vertex,class"));
    assert!(text.contains("\"v(1)\",\"(1)\""), "{text}");
}

#[test]
fn verify_all_auts_passes_and_is_deterministic() {
    let first = gammak0(&["verify", "Z/2 x Z/2", "--all-auts"]);
    assert!(first.status.success());
    let text = stdout(&first);
    assert!(!text.contains("FAIL"), "{text}");
    assert!(text.contains("lifting.induced_maps_distinct expected=6 distinct actual=6 distinct"));
    let second = gammak0(&["verify", "Z/2 x Z/2", "--all-auts"]);
    assert_eq!(
        first.stdout, second.stdout,
        "reports must be byte-identical"
    );
}

#[test]
fn verify_single_automorphism() {
    let out = gammak0(&["verify", "Z/5", "--aut", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).contains("induced.equals_phi"));
}

#[test]
fn verify_rejects_non_invertible_aut() {
    let out = gammak0(&["verify", "Z/4", "--aut", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("not invertible"), "{}", stderr(&out));
}

#[test]
fn verify_rejects_ill_defined_aut() {
    let out = gammak0(&["verify", "Z/4", "--aut", "0,1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn snf_prints_diagonal_and_transforms() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.txt");
    std::fs::write(&path, "2 2\n2 4\n6 8\n").unwrap();
    let out = gammak0(&["snf", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("diagonal: 2 4"), "{text}");
    assert!(text.contains("U:\n2 2\n"), "{text}");
    assert!(text.contains("V:\n2 2\n"), "{text}");
}

#[test]
fn snf_of_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("id.txt");
    std::fs::write(&path, "2 2\n1 0\n0 1\n").unwrap();
    let out = gammak0(&["snf", path.to_str().unwrap()]);
    assert!(stdout(&out).contains("diagonal: 1 1"));
}

#[test]
fn snf_rejects_malformed_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    std::fs::write(&path, "2 2\n1 x\n0 1\n").unwrap();
    let out = gammak0(&["snf", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn export_dot_renders_every_core_vertex() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g0.json");
    assert!(build_graph("0", &path).status.success());
    let out = gammak0(&["export-dot", path.to_str().unwrap()]);
    assert!(out.status.success());
    let dot = stdout(&out);
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("label=").count(), 5, "{dot}");
    assert!(dot.contains("peripheries=2"), "tail marker expected: {dot}");
}

#[test]
fn missing_files_exit_3() {
    for args in [
        vec!["k0", "/nonexistent/g.json"],
        vec!["snf", "/nonexistent/m.txt"],
        vec!["export-dot", "/nonexistent/g.json"],
    ] {
        let out = gammak0(&args);
        assert_eq!(out.status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn malformed_graph_json_exits_2_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"vertices":[{"tag":"plain","id":"a"}],"edges":[[0,9]],"loops":{},"tails":[]}"#,
    )
    .unwrap();
    let out = gammak0(&["k0", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("edges[0]"), "{}", stderr(&out));
}

#[test]
fn finite_mode_rejects_declared_tails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g2.json");
    assert!(build_graph("Z/2", &path).status.success());
    let out = gammak0(&["k0", path.to_str().unwrap(), "--mode", "finite"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("tail anchors"), "{}", stderr(&out));
}

#[test]
fn windowed_build_and_k0() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zw.json");
    let out = gammak0(&["build", "Z", "-o", path.to_str().unwrap(), "--window", "2"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("core vertices: 43"));
    let out = gammak0(&["k0", path.to_str().unwrap()]);
    assert!(stdout(&out).contains("K0: Z\n"), "{}", stdout(&out));
}
