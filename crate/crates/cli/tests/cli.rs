use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ncgeom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncgeom")).args(args).env_remove("NC_ORDER").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

#[test]
fn star_of_coordinates_on_the_moyal_plane() {
    // x1 * x2 = x1 x2 + (i/2) theta lambda, and the opposite order flips the sign.
    let o = ncgeom(&["star", "--dim", "2", "--theta", "1", "--order", "2", "--f", "x1", "--g", "x2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "x1*x2 + L*((1/2)i)\n");
    let o = ncgeom(&["star", "--dim", "2", "--theta", "1", "--order", "2", "--f", "x2", "--g", "x1"]);
    assert_eq!(stdout(&o), "x1*x2 + L*(-(1/2)i)\n");
}

#[test]
fn star_truncates_at_the_requested_order() {
    // x1^2 * x2^2 = x1^2 x2^2 + 2i x1 x2 lambda - (1/2) lambda^2 with theta = 1.
    let full = ncgeom(&["star", "--theta", "1", "--order", "2", "--f", "x1^2", "--g", "x2^2"]);
    assert_eq!(stdout(&full), "x1^2*x2^2 + L*(2i*x1*x2) + L^2*(-1/2)\n");
    let cut = ncgeom(&["star", "--theta", "1", "--order", "1", "--f", "x1^2", "--g", "x2^2"]);
    assert_eq!(stdout(&cut), "x1^2*x2^2 + L*(2i*x1*x2)\n");
}

#[test]
fn order_can_come_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_ncgeom"))
        .args(["star", "--theta", "1", "--f", "x1^2", "--g", "x2^2"])
        .env("NC_ORDER", "1")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "x1^2*x2^2 + L*(2i*x1*x2)\n");
    let o = Command::new(env!("CARGO_BIN_EXE_ncgeom")).args(["star", "--f", "x1", "--g", "x2"]).env("NC_ORDER", "0").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["star", "--f", "x1 +", "--g", "x2"][..],
        &["star", "--dim", "2", "--f", "x3", "--g", "x1"],
        &["star", "--dim", "3", "--theta", "1", "--f", "x1", "--g", "x2"],
        &["verify", "--suite", "nonsense"],
        &["bracket", "--f", "x1"],
        &["modes", "--config", "/nonexistent/lattice.json"],
    ] {
        let o = ncgeom(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(String::from_utf8_lossy(&o.stderr).contains("error"), "{args:?}");
    }
}

#[test]
fn bracket_of_canonical_pair_is_one() {
    let o = ncgeom(&["bracket", "--n", "2", "--theta", "1/2", "--f", "x1", "--g", "p1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "{f, g}_* = 1\n{f, g}   = 1\n");
}

#[test]
fn bracket_scenario_reports_conserved_momenta() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("free.json");
    fs::write(&file, r#"{"n": 2, "theta": ["1/3"], "hamiltonian": "p1^2 + p2^2", "observables": ["p1", "p2"]}"#).unwrap();
    let o = ncgeom(&["bracket", "--config", path(&file), "--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("d/dt p1 = 0\n"), "{out}");
    assert!(out.contains("hamiltonian twist-invariant: true\n"), "{out}");
}

fn quick_config(dir: &Path, extra: &str) -> String {
    let file = dir.join("run.json");
    let text = format!(r#"{{"suites": ["poisson", "modes"], "order": 2, "samples": 2, "mode_pairs": 4{extra}}}"#);
    fs::write(&file, text).unwrap();
    file.to_str().unwrap().to_string()
}

#[test]
fn verify_reports_are_byte_identical_without_timing() {
    let dir = tempfile::tempdir().unwrap();
    let config = quick_config(dir.path(), "");
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for out in [&a, &b] {
        let o = ncgeom(&["verify", "--config", &config, "--quiet", "--no-timing", "--output", path(out)]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    }
    let (ta, tb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let report: serde_json::Value = serde_json::from_slice(&ta).unwrap();
    assert!(report.get("timing").is_none());
    assert_eq!(report["summary"]["failed"], 0);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn verify_with_timing_adds_a_timing_table() {
    let dir = tempfile::tempdir().unwrap();
    let config = quick_config(dir.path(), "");
    let out = dir.path().join("timed.json");
    let o = ncgeom(&["verify", "--config", &config, "--quiet", "--output", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["timing"].as_array().unwrap().len(), report["checks"].as_array().unwrap().len());
}

#[test]
fn a_failed_check_exits_with_one() {
    // With theta = 0 the deformed Poisson bracket cannot differ from the
    // undeformed one, so the check expecting a difference fails.
    let dir = tempfile::tempdir().unwrap();
    let config = quick_config(dir.path(), r#", "theta": "0""#);
    let o = ncgeom(&["verify", "--config", &config, "--suite", "poisson"]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.lines().any(|l| l.starts_with("FAIL") && l.contains("poisson/deformation_visible")), "{out}");
}

#[test]
fn flags_override_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = quick_config(dir.path(), "");
    let out = dir.path().join("r.json");
    let o = ncgeom(&["verify", "--config", &config, "--suite", "modes", "--order", "1", "--quiet", "--no-timing", "--output", path(&out)]);
    assert_eq!(o.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(&out).unwrap()).unwrap();
    assert_eq!(report["config"]["suites"], serde_json::json!(["modes"]));
    assert_eq!(report["config"]["order"], 1);
}

#[test]
fn modes_accepts_a_lattice_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("lattice.json");
    fs::write(&file, r#"{"d": 2, "momenta": [[1, 0], [-1, 0], [0, 1], [0, -1]], "theta": "sym", "E": {"1,0": "3/2"}}"#).unwrap();
    let o = ncgeom(&["modes", "--config", path(&file), "--pairs", "6", "--quiet"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).ends_with(" 0 failed\n"));
}

#[test]
fn geometry_runs_for_one_family() {
    let o = ncgeom(&["geometry", "--family", "moyal", "--order", "2", "--connections", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().any(|l| l.starts_with("PASS") && l.contains("bianchi")));
}
