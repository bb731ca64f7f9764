use std::path::PathBuf;
use std::process::Command;

use colombeau_cli::ScenarioConfig;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_colombeau"));
    for v in ["COLOMBEAU_CONFIG", "COLOMBEAU_OUT", "COLOMBEAU_EPS_GRID", "COLOMBEAU_GRID"] {
        c.env_remove(v);
    }
    c
}

fn golden() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/default.toml")
}

#[test]
fn golden_scenario_matches_default() {
    let text = std::fs::read_to_string(golden()).unwrap();
    let parsed = ScenarioConfig::from_toml(&text).unwrap();
    assert_eq!(parsed, ScenarioConfig::default_scenario());
    assert_eq!(text, ScenarioConfig::default_scenario().to_toml());
}

#[test]
fn delta_is_not_negligible() {
    let out = bin().args(["check", "iota(delta)", "--negligible"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn empty_suite_list_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.toml");
    std::fs::write(&path, "suites = []\n").unwrap();
    let out = bin().arg("--config").arg(&path).arg("run").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_config_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(&path, "suites = []\n[grid]\npoints = 7\n").unwrap();
    let out = bin().arg("--config").arg(&path).arg("run").output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    std::fs::write(&path, "colour = 1\n").unwrap();
    let out = bin().arg("--config").arg(&path).arg("run").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_flags_exit_two() {
    let out = bin().args(["--eps-grid", "9:2", "verify-testobject"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["check", "iota(delta)"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn fourier_of_heaviside_is_rejected_with_path() {
    let out = bin()
        .args(["sweep", "F(iota(heaviside))", "--seminorm", "S(a=0,b=0)"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("root/F"), "{err}");
}

#[test]
fn sweep_writes_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("--out")
        .arg(dir.path())
        .args(["--eps-grid", "2:4", "sweep", "sigma(gauss)", "--seminorm", "S(a=0,b=0)", "K(r=2,b=1)"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let entries: Vec<_> = std::fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(entries.len(), 1);
    let text = std::fs::read_to_string(entries[0].as_ref().unwrap().path()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("representative,net,seminorm,eps,value"));
    // 2 nets x 2 seminorms x 3 eps
    assert_eq!(lines.count(), 12);
}

#[test]
fn readme_expressions_parse() {
    for text in [
        "iota(delta) * iota(delta)",
        "sigma(gauss) * iota(delta) - iota(delta)",
        "D^2(iota(heaviside))",
        "F(tau(0.5)(iota(delta)))",
        "(1-2i) iota(delta_prime(a=1)) conv sigma(gauss)",
    ] {
        colombeau_cli::parse_expression(text).unwrap_or_else(|e| panic!("{text}: {e}"));
    }
    assert!(colombeau_cli::parse_expression("F(iota(heaviside))").is_err());
}
