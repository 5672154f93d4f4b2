use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sunchain"))
}

fn repo_config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str], config: &Path, out: &Path) -> Output {
    bin().args(args).arg(config).arg("--out-dir").arg(out).output().unwrap()
}

fn text(o: &Output) -> String {
    format!("{}{}", String::from_utf8_lossy(&o.stdout), String::from_utf8_lossy(&o.stderr))
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn verify_su3_seven_particles() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify"], &repo_config("su3_l4_m7.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["schema"], "sunchain-report/1");
    assert_eq!(report["draws"].as_array().unwrap().len(), 5);
    for d in report["draws"].as_array().unwrap() {
        assert_eq!(d["spectra"][0]["ground"]["lowest_diagram"], "3,2,2");
        assert_eq!(d["spectra"][0]["ground"]["multiplicity"], 3);
    }
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 42);
    assert_eq!(manifest["passed"], true);
    assert!(manifest.get("wall_time_seconds").is_none());
    assert_eq!(manifest["checks"]["ordering"]["failed"], 0);
    assert!(dir.path().join("table.csv").exists());
}

#[test]
fn infeasible_sector_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"chain": {"sites": 2, "flavors": 1}, "particles": {"sectors": [[3]]},
            "couplings": {"fixed": {"hopping": 1, "exchange": 1, "pair_hopping": 1}}}"#,
    );
    let o = run(&["verify"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("L >= max M_alpha"), "{}", text(&o));
}

#[test]
fn negative_hopping_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"chain": {"sites": 3, "flavors": 2}, "particles": {"total": 2},
            "couplings": {"fixed": {"hopping": [1, -1], "exchange": 1, "pair_hopping": 1}}}"#,
    );
    let o = run(&["verify"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("strictly positive"), "{}", text(&o));
}

#[test]
fn malformed_config_names_field_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "{\n  \"chain\": {\"sites\": 3, \"flavors\": 2},\n  \"particles\": {\"total\": 2},\n  \"coupling\": {}\n}",
    );
    let o = run(&["verify"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let t = text(&o);
    assert!(t.contains("coupling") && t.contains("line 4"), "{t}");
}

#[test]
fn empty_sector_list_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"chain": {"sites": 3, "flavors": 2}, "particles": {"sectors": []},
            "couplings": {"fixed": {"hopping": 1, "exchange": 1, "pair_hopping": 1}}}"#,
    );
    let o = run(&["spectrum"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    assert!(text(&o).contains("empty"));
}

#[test]
fn spectrum_table_lists_two_row_diagrams() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum"], &repo_config("su2_l4_m4.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    assert!(!dir.path().join("report.json").exists());
    let mut reader = csv::Reader::from_path(dir.path().join("table.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    let names: Vec<&str> = rows.iter().map(|r| &r[2]).collect();
    assert_eq!(names, ["2,2", "3,1", "4"]);
    let energy = |i: usize| rows[i][4].parse::<f64>().unwrap();
    assert!(energy(0) < energy(1) && energy(1) < energy(2));
    // no verdicts in spectrum tables
    assert!(rows.iter().all(|r| r[8].is_empty()));
}

#[test]
fn free_spectrum_matches_filled_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["spectrum"], &repo_config("free_su3_l5.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let mut reader = csv::Reader::from_path(dir.path().join("table.csv")).unwrap();
    let mut rows = 0;
    for r in reader.records() {
        let r = r.unwrap();
        if &r[3] == "true" {
            let e: f64 = r[4].parse().unwrap();
            let free: f64 = r[7].parse().unwrap();
            assert!((e - free).abs() < 1e-10);
            rows += 1;
        }
    }
    assert!(rows > 0);
}

#[test]
fn sector_lists_run_checks() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--format", "json"], &repo_config("sectors.json"), dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let report: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    let sectors = report["draws"][0]["sectors"].as_array().unwrap();
    assert_eq!(sectors.len(), 3);
    assert_eq!(sectors[0]["permutation"]["energies"].as_array().unwrap().len(), 3);
    assert!(!dir.path().join("table.csv").exists());
}

#[test]
fn flag_overrides_apply() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(
        &["verify", "--sites", "3", "--particles", "4", "--seed", "7"],
        &repo_config("su3_l4_m7.json"),
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", text(&o));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["chain"]["sites"], 3);
    assert_eq!(manifest["config"]["particles"]["total"], 4);
}

#[test]
fn selftest_passes_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let mut manifests = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}"));
        let o = bin().args(["selftest", "--seed", "3", "--out-dir"]).arg(&out).output().unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", text(&o));
        manifests.push(fs::read(out.join("manifest.json")).unwrap());
    }
    assert_eq!(manifests[0], manifests[1]);
}

#[test]
fn selftest_catches_broken_sign_convention() {
    let o = bin().args(["selftest", "--mode-order", "site-major"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(text(&o).contains("FAIL  off-diagonal nonpositivity"), "{}", text(&o));
}

#[test]
fn solver_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"chain": {"sites": 4, "flavors": 2, "potential": {"kind": "hubbard", "u": 1.0}},
            "particles": {"total": 4},
            "couplings": {"fixed": {"hopping": 1, "exchange": 1, "pair_hopping": 1}},
            "solver": {"dense_crossover": 1, "max_krylov": 2, "max_restarts": 0}}"#,
    );
    let o = run(&["verify"], &cfg, &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(3), "{}", text(&o));
    assert!(text(&o).contains("eigensolver failed in sector"), "{}", text(&o));
}
