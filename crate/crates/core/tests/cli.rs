use std::path::Path;
use std::process::{Command, Output};

use risfas::cli::config::parse_config;
use risfas::cli::sweep::point_seeds;
use risfas::secrecy::{sop, SopPath};

const BIN: &str = env!("CARGO_BIN_EXE_risfas");

const SMALL: &str = r#"
avg_snr_e_db = 0.0
rate_bits = 0.5
[sweep]
axis = "avg_snr_b_db"
values = [0.0, 4.0]
[mc]
trials = 20000
batch = 1000
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let p = dir.join("cfg.toml");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn default_scenario_single_row() {
    let o = run(&["analyze"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    let lines: Vec<_> = s.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("avg_snr_b_db,avg_snr_e_db,sop_glq,"));
    assert!(lines[0].ends_with(",flags"));
    assert!(lines[1].contains("sop_glq:below_numerical_floor"));
}

#[test]
fn single_point_matches_library_call() {
    let text = "[sweep]\noutputs = [\"sop_reference\"]";
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), text);
    let o = run(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let row: Vec<_> = s.lines().nth(1).unwrap().split(',').collect();

    let cfg = parse_config(text).unwrap();
    let seeds = point_seeds(&cfg);
    let scen = cfg.scenario(seeds[0].axis_value, seeds[0].mvn).unwrap();
    let r = sop(&scen, SopPath::Reference).unwrap();
    assert_eq!(row[2], format!("{:.5e}", r.value));
    assert_eq!(row[3], format!("{:.5e}", r.error));
}

#[test]
fn two_point_csv_and_json_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL);
    let csv_path = dir.path().join("out.csv");
    let o = run(&["simulate", "--config", path.to_str().unwrap(), "--out", csv_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let o = run(&["simulate", "--config", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for (line, row) in csv.lines().skip(1).zip(rows) {
        let cells: Vec<_> = line.split(',').collect();
        let json_sop = row["sop_mc"].as_f64().unwrap();
        assert_eq!(cells[2], format!("{json_sop:.5e}"));
        let parsed: f64 = cells[2].parse().unwrap();
        assert!(((parsed - json_sop) / json_sop).abs() < 5e-6);
        assert!(row["wall_time_s"].as_f64().unwrap() >= 0.0);
    }
    let meta = &v["meta"];
    assert_eq!(meta["eve_snr_mode"], "explicit");
    let defaulted: Vec<&str> = meta["defaulted_fields"].as_array().unwrap().iter().map(|x| x.as_str().unwrap()).collect();
    assert!(defaulted.contains(&"ris_elements"));
    assert!(!defaulted.contains(&"rate_bits"));
    let mut sorted = defaulted.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), defaulted.len());
    assert_eq!(meta["seeds"].as_array().unwrap().len(), 2);
}

#[test]
fn csv_is_independent_of_workers() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), SMALL);
    let p = path.to_str().unwrap();
    let a = run(&["simulate", "--config", p, "--workers", "1"]);
    let b = run(&["simulate", "--config", p, "--workers", "4"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["simulate", "--config", p, "--workers", "4", "--seed", "7"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn config_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "[link]\npathloss_exp = 1.5\n");
    let o = run(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pathloss_exp"));

    let path = write_config(dir.path(), "nope = 3\n");
    let o = run(&["analyze", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("ris_elements"));

    let o = run(&["analyze", "--config", "/nonexistent/cfg.toml"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["analyze", "--glq-order", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dist_table_has_both_nodes() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_config(dir.path(), "avg_snr_e_db = 0.0\n[dist]\npoints = 4\n");
    let o = run(&["dist", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let lines: Vec<_> = s.lines().collect();
    assert_eq!(lines[0], "avg_snr_b_db,avg_snr_e_db,node,gamma,cdf,cdf_err,pdf_paper,pdf_derivative,flags");
    assert_eq!(lines.len(), 9);
    assert_eq!(lines.iter().filter(|l| l.contains(",e,")).count(), 4);
}
