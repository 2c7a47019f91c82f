//! End-to-end runs of the `radcap` binary.

use std::path::Path;
use std::process::{Command, Output};

use radcap_cli::config::RunConfig;
use radcap_cli::error::CliError;

fn radcap(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radcap")).args(args).current_dir(dir).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, row: usize, col: usize) -> f64 {
    csv.lines().nth(row).unwrap().split(',').nth(col).unwrap().parse().unwrap()
}

#[test]
fn measure_plane_grid() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&radcap(&["measure", "--weight", "constant", "--n", "2", "--grid", "1e-3:1:50"], dir.path()));
    assert_eq!(text.lines().next(), Some("r,f,fprime"));
    assert_eq!(text.lines().count(), 51);
    assert!((column(&text, 50, 1) - std::f64::consts::PI).abs() <= 1e-12);
    assert!(!text.contains('\r'));
}

#[test]
fn measure_ladder_and_cantor() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&radcap(&["measure", "--weight", "ex1", "--grid-ladder", "6"], dir.path()));
    assert_eq!(text.lines().count(), 1 + 14);
    let text = stdout(&radcap(&["measure", "--weight", "cantor", "--depth", "10"], dir.path()));
    let row = (1..text.lines().count()).find(|&i| (column(&text, i, 0) - 1.0 / 3.0).abs() <= 1e-15).expect("row at 1/3");
    assert!((column(&text, row, 1) - 0.5).abs() <= 1e-12);
}

#[test]
fn exponents_report_endpoints() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&radcap(&["exponents", "--weight", "abcd", "--n", "2", "--a", "1.5", "--b", "2", "--c", "2.5", "--d", "3"], dir.path()));
    let json: serde_json::Value = serde_json::from_str(&text).unwrap();
    let sets = json["report"]["sets"].as_array().expect("sets array");
    let endpoint = |name: &str| sets.iter().find(|s| s["set"] == name).and_then(|s| s["endpoint"].as_f64()).unwrap();
    for (name, want) in [("lQ0", 1.5), ("lS0", 2.0), ("uS0", 2.5), ("uQ0", 3.0)] {
        assert!((endpoint(name) - want).abs() <= 0.1, "{name}: {}", endpoint(name));
    }
}

#[test]
fn capacity_single_annulus_and_whole_space() {
    let dir = tempfile::tempdir().unwrap();
    let base = ["capacity", "--weight", "constant", "--n", "2", "--p", "2", "--r", "1"];
    let text = stdout(&radcap(&[&base[..], &["--R", "2.718281828"]].concat(), dir.path()));
    assert_eq!(text.lines().next(), Some("r,R,capacity,method,error_bound"));
    assert!((column(&text, 1, 2) - 2.0 * std::f64::consts::PI).abs() <= 1e-6);
    let text = stdout(&radcap(&[&base[..], &["--R", "inf"]].concat(), dir.path()));
    assert_eq!(text.lines().nth(1).unwrap().split(',').nth(2), Some("0"));
}

#[test]
fn capacity_log_weight_matches_closed_form() {
    // f'(ρ) = ω ρ (log 1/ρ)^β with ω = 2π, p = 2: the integral is (1/ω) ∫ t^{-β} dt over
    // t ∈ [log 1/R, log 1/r].
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&radcap(&["capacity", "--weight", "powerlog0", "--n", "2", "--p", "2", "--beta", "3", "--r", "1e-8", "--R", "1e-2"], dir.path()));
    let (t1, t2) = ((1e2f64).ln(), (1e8f64).ln());
    let integral = (t1.powi(-2) - t2.powi(-2)) / 2.0 / (2.0 * std::f64::consts::PI);
    let got = column(&text, 1, 2);
    assert!((got * integral - 1.0).abs() <= 1e-9, "{got} vs {}", 1.0 / integral);
}

#[test]
fn check_writes_json_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("space.json");
    stdout(&radcap(&["check", "--weight", "constant", "--n", "3", "--p", "2", "--out", out.to_str().unwrap()], dir.path()));
    let reports: serde_json::Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    for id in ["UB-MIN", "LB-INT-lQ"] {
        let rep = reports.as_array().unwrap().iter().find(|r| r["bound_id"] == id).expect(id);
        assert_eq!(rep["verdict"]["status"], "consistent", "{id}");
        let csv = std::fs::read_to_string(dir.path().join(format!("space.{id}.csv"))).unwrap();
        assert_eq!(csv.lines().next(), Some("r,R,capacity,bound,ratio"));
    }
}

#[test]
fn check_audit_finds_violation() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&radcap(&["check", "--weight", "ex1", "--p", "3", "--audit", "--bound", "LB-INT-lQ"], dir.path()));
    let reports: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(reports[0]["verdict"]["status"], "violated");
}

#[test]
fn check_log_weight_default_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&radcap(&["check", "--weight", "powerlog0", "--n", "2", "--p", "2", "--beta", "-1"], dir.path()));
    let reports: serde_json::Value = serde_json::from_str(&text).unwrap();
    let rep = reports.as_array().unwrap().iter().find(|r| r["bound_id"] == "LB-BORDER-lQ").expect("lower log bound checked");
    assert_eq!(rep["verdict"]["status"], "consistent");
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["exponents", "--weight", "ex1", "--seed", "3"][..],
        &["capacity", "--weight", "ex1", "--p", "3", "--grid", "1e-9:1e-1:12"][..],
        &["check", "--weight", "powerlog0", "--n", "2", "--p", "2", "--beta", "-1"][..],
    ] {
        assert_eq!(stdout(&radcap(args, dir.path())), stdout(&radcap(args, dir.path())), "{args:?}");
    }
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "p = 2.0\nr = 1.0\nR = 2.718281828459045\n\n[weight]\nkind = \"constant\"\nn = 3\n").unwrap();
    let cfg = path.to_str().unwrap();
    let text = stdout(&radcap(&["capacity", "--config", cfg], dir.path()));
    // n = 3, p = 2: 4π / (1 - 1/e).
    let want = 4.0 * std::f64::consts::PI / (1.0 - (-1f64).exp());
    assert!((column(&text, 1, 2) / want - 1.0).abs() <= 1e-10);
    let text = stdout(&radcap(&["capacity", "--config", cfg, "--n", "2"], dir.path()));
    assert!((column(&text, 1, 2) - 2.0 * std::f64::consts::PI).abs() <= 1e-6);
}

#[test]
fn config_round_trips_through_toml() {
    let text = "p = 3.0\nseed = 7\naudit = true\nbounds = [\"UB-MIN\"]\nregime = \"large\"\ngrid = { lo = 1e-6, hi = \"inf\", points = 9 }\n\n[weight]\nkind = \"abcd\"\nn = 2\na = 1.5\nb = 2.0\nc = 2.5\nd = 3.0\n";
    let cfg = RunConfig::from_toml(text).unwrap();
    let again = RunConfig::from_toml(&cfg.to_toml().unwrap()).unwrap();
    assert_eq!(cfg, again);
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "p = 2.0\nunknown_key = 1\n").unwrap();
    let cases: [&[&str]; 4] = [
        &["capacity", "--config", path.to_str().unwrap()],
        &["measure", "--weight", "no-such-weight"],
        &["capacity", "--weight", "constant", "--n", "2", "--r", "1", "--R", "2"],
        &["capacity", "--weight", "constant", "--n", "2", "--p", "2", "--r", "2", "--R", "1"],
    ];
    for args in cases {
        assert_eq!(radcap(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn exit_code_mapping() {
    assert_eq!(CliError::Config("x".into()).exit_code(), 2);
    assert_eq!(CliError::Library(radcap::Error::Unsupported("x".into())).exit_code(), 2);
    assert_eq!(
        CliError::Library(radcap::Error::Accuracy {
            estimate: radcap::LogScalar::ONE,
            error_bound: 1.0
        })
        .exit_code(),
        3
    );
    assert_eq!(CliError::Gallery(vec!["ex1".into()]).exit_code(), 4);
}

#[test]
fn gallery_writes_manifests() {
    let dir = tempfile::tempdir().unwrap();
    let out = radcap(&["gallery", "--out", "g"], dir.path());
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS ")).count(), radcap_cli::gallery::ITEMS.len());
    for item in radcap_cli::gallery::ITEMS {
        let manifest: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("g").join(format!("{item}.json"))).unwrap()).unwrap();
        assert_eq!(manifest["pass"], true, "{item}");
    }
    assert!(dir.path().join("g/summary.json").exists());
}
