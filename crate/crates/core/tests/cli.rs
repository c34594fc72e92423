use std::path::Path;
use std::process::{Command, Output};

use bose_thermo::bound::BoundReport;
use bose_thermo::cli::{DysonRunConfig, SweepRow, TruncationReport};
use bose_thermo::ideal_gas::IdealGasPoint;
use bose_thermo::kernels::{DecayReport, HoleLemmaReport, ProductBump, Verdict};
use bose_thermo::scattering::ScatteringSolution;
use serde::de::DeserializeOwned;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bose-thermo")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).expect("UTF-8 output")
}

fn parse<T: DeserializeOwned>(args: &[&str]) -> T {
    serde_json::from_str(&ok(args)).unwrap_or_else(|e| panic!("{args:?}: {e}"))
}

fn hard_core_file(dir: &Path) -> String {
    let path = dir.join("hs.json");
    std::fs::write(&path, r#"{"kind":"hard_core","params":{"radius":1.0}}"#).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn scattering_and_truncation_reports_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let hs = hard_core_file(dir.path());
    let sol: ScatteringSolution = parse(&["scattering", "--potential", &hs]);
    assert!((sol.a - 1.0).abs() < 1e-9);
    let closed: ScatteringSolution =
        parse(&["scattering", "--potential", &hs, "--method", "closed-form", "--phi", "10"]);
    let rep: TruncationReport = parse(&["truncate", "--potential", &hs, "--phi", "10"]);
    assert!(rep.a_tilde < rep.a && rep.a_tilde > 0.0);
    assert!(rep.moment <= 20.0 * (1.0 + 1e-12));
    assert!(closed.a < 1.0);
}

#[test]
fn ideal_table_has_header_and_rows() {
    let csv = ok(&["ideal", "--beta", "1", "--rho-grid", "0.01:0.2:40"]);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 42);
    assert!(lines[0].starts_with("# units"));
    assert_eq!(lines[1], "T,rho,mu0,f0,cV,condensate");
    assert!(lines[2..].iter().all(|l| l.split(',').count() == 6));
    let rows: Vec<IdealGasPoint> = parse(&["ideal", "--beta", "1", "--rho-grid", "0.01:0.2:5", "--format", "json"]);
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r.mu0 <= 0.0));
}

#[test]
fn bound_and_sweep_round_trip() {
    let rep: BoundReport = parse(&["bound", "--a", "1e-4", "--beta", "1", "--rho", "1"]);
    assert!(rep.lower_bound >= rep.high_t.value.min(rep.low_t.value));
    let rows: Vec<SweepRow> =
        parse(&["sweep", "--beta", "1", "--rho", "1", "--a-grid", "1e-8:1e-2:4", "--format", "json"]);
    assert_eq!(rows.len(), 4);
    let csv = ok(&["sweep", "--beta", "1", "--rho", "1", "--a-grid", "1e-8:1e-2:4"]);
    assert_eq!(csv.lines().nth(1), Some("x,a,branch,error_factor,lower_bound"));
}

#[test]
fn kernel_verdicts_round_trip() {
    let hole: Verdict<HoleLemmaReport> = parse(&["kernels-verify", "hole", "--mesh", "512"]);
    assert!(hole.holds);
    let decay: Verdict<(ProductBump, DecayReport)> =
        parse(&["kernels-verify", "decay", "--box-l", "64", "--grid-n", "32", "--n", "0"]);
    assert_eq!(decay.config.1.n, 0);
    let dyson: Verdict<DysonRunConfig> =
        parse(&["--seed", "2", "kernels-verify", "dyson", "--box-l", "16", "--grids", "16,24", "--r", "6", "--s", "4"]);
    assert_eq!(dyson.config.seed, 2);
    assert_eq!(dyson.config.certificate.runs.len(), 2);
}

#[test]
fn out_flag_writes_the_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = cli(&["ideal", "--beta", "1", "--rho-grid", "0.01:0.2:3", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 5);
    assert!(String::from_utf8_lossy(&out.stdout).contains("3 rows"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"kind": "hard_core", "params": {"radius": }"#).unwrap();
    assert_eq!(cli(&["scattering", "--potential", bad.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(cli(&["scattering", "--potential", "/nonexistent/p.json"]).status.code(), Some(1));
    assert_eq!(cli(&["bound", "--a", "-1", "--beta", "1", "--rho", "1"]).status.code(), Some(1));
    assert_eq!(cli(&["ideal", "--beta", "1", "--rho-grid", "1:2"]).status.code(), Some(1));
    assert_eq!(cli(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(cli(&["kernels-verify", "hole", "--mesh", "64"]).status.code(), Some(1));
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
}

#[test]
fn same_seed_same_bytes() {
    let args = [
        "--seed",
        "5",
        "kernels-verify",
        "dyson",
        "--box-l",
        "16",
        "--grids",
        "16,24",
        "--scatterers",
        "2",
        "--r",
        "6",
        "--s",
        "4",
    ];
    assert_eq!(ok(&args), ok(&args));
    let sweep = ["sweep", "--beta", "1", "--rho", "1", "--a-grid", "1e-8:1e-2:9"];
    let one =
        Command::new(env!("CARGO_BIN_EXE_bose-thermo")).args(sweep).env("BOSE_THERMO_JOBS", "1").output().unwrap();
    let four =
        Command::new(env!("CARGO_BIN_EXE_bose-thermo")).args(sweep).env("BOSE_THERMO_JOBS", "4").output().unwrap();
    assert_eq!(one.stdout, four.stdout);
}
