use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const FIG1: &str = "151,88,72,260\n302,330,0,158\n161,0,313,81\n490,0,101,14\n";

fn apscore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_apscore"))
        .args(args)
        .env_remove("APSCORE_SEED")
        .output()
        .expect("spawn apscore")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_fig1(dir: &Path) -> String {
    let p = dir.join("fig1.csv");
    fs::write(&p, FIG1).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn score_prints_every_item_rounded() {
    let dir = TempDir::new().unwrap();
    let out = apscore(&["score", &write_fig1(dir.path())]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let line = |label: &str| {
        text.lines()
            .find(|l| l.split_whitespace().next() == Some(label))
            .unwrap_or_else(|| panic!("no {label} line in\n{text}"))
            .split_whitespace()
            .last()
            .unwrap()
            .to_string()
    };
    assert_eq!(line("AP"), "0.617");
    assert_eq!(line("A"), "1.000");
    assert_eq!(line("P"), "0.446");
    assert_eq!(line("F1"), "0.578");
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn score_single_metric() {
    let dir = TempDir::new().unwrap();
    let out = apscore(&["score", "--metrics", "ap", &write_fig1(dir.path())]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "AP 0.617");
}

#[test]
fn json_and_csv_carry_identical_values() {
    let dir = TempDir::new().unwrap();
    let f = write_fig1(dir.path());
    let csv = stdout(&apscore(&["score", "--format", "csv", &f]));
    let json: Value = serde_json::from_str(&stdout(&apscore(&["score", "--format", "json", &f]))).unwrap();
    let mut n = 0;
    for line in csv.lines().skip(1) {
        let (key, value) = line.split_once(',').unwrap();
        let v: f64 = value.parse().unwrap();
        assert_eq!(json[key].as_f64().unwrap(), v, "{key}");
        n += 1;
    }
    assert_eq!(n, json.as_object().unwrap().len());
}

#[test]
fn score_output_file() {
    let dir = TempDir::new().unwrap();
    let f = write_fig1(dir.path());
    let dest = dir.path().join("out.txt");
    let out = apscore(&["score", "--metrics", "f1", "-o", dest.to_str().unwrap(), &f]);
    assert!(out.status.success());
    assert!(stdout(&out).is_empty());
    assert_eq!(fs::read_to_string(dest).unwrap().trim(), "F1 0.578");
}

#[test]
fn zero_table_fails_with_diagnostic() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("zeros.csv");
    fs::write(&p, "0,0\n0,0\n").unwrap();
    let out = apscore(&["score", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).is_empty());
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.to_lowercase().contains("zero"), "{err}");
}

#[test]
fn empty_file_fails() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("empty.csv");
    fs::write(&p, "").unwrap();
    let out = apscore(&["score", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn parse_errors_name_the_position() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("bad.csv");
    fs::write(&p, "1,2\n3,x\n").unwrap();
    let err = stderr(&apscore(&["score", p.to_str().unwrap()]));
    assert!(err.contains("line 2") && err.contains("column 2"), "{err}");

    fs::write(&p, "1,2\n3\n").unwrap();
    let out = apscore(&["score", p.to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn unknown_metric_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let out = apscore(&["score", "--metrics", "nmi", &write_fig1(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gen_writes_tables_with_fixed_sum() {
    let dir = TempDir::new().unwrap();
    let d = dir.path().join("low");
    let out = apscore(&[
        "gen", "--shape", "4x4", "--mode", "low", "--n", "500", "--total", "2521", "--seed", "7", "--out",
        d.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(fs::read_dir(&d).unwrap().count(), 500);
    for k in [0, 137, 499] {
        let text = fs::read_to_string(d.join(format!("table_{k}.csv"))).unwrap();
        let rows: Vec<Vec<u64>> = text
            .lines()
            .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
            .collect();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.len() == 4));
        assert_eq!(rows.iter().flatten().sum::<u64>(), 2521);
    }
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let d = dir.path().join(name);
        let out = apscore(&["gen", "--shape", "4x2", "--mode", "high", "--n", "1", "--seed", "1", "--out", d.to_str().unwrap()]);
        assert!(out.status.success());
        fs::read_to_string(d.join("table_0.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn gen_seed_from_environment() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str, env_seed: Option<&str>| {
        let d = dir.path().join(name);
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_apscore"));
        cmd.args(["gen", "--n", "1", "--out", d.to_str().unwrap()]);
        cmd.env_remove("APSCORE_SEED");
        if let Some(s) = env_seed {
            cmd.env("APSCORE_SEED", s);
        }
        assert!(cmd.output().unwrap().status.success());
        fs::read_to_string(d.join("table_0.csv")).unwrap()
    };
    let from_env = run("env", Some("99"));
    let d = dir.path().join("flag");
    assert!(apscore(&["gen", "--n", "1", "--seed", "99", "--out", d.to_str().unwrap()]).status.success());
    assert_eq!(from_env, fs::read_to_string(d.join("table_0.csv")).unwrap());
    assert_ne!(from_env, run("default", None));
}

#[test]
fn gen_rejects_empty_shape() {
    let dir = TempDir::new().unwrap();
    let out = apscore(&["gen", "--shape", "0x4", "--out", dir.path().to_str().unwrap()]);
    assert!(!out.status.success());
    assert!(stderr(&out).contains("shape"), "{}", stderr(&out));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn gen_concat_round_trips() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("all.csv");
    let out = apscore(&["gen", "--n", "3", "--concat", p.to_str().unwrap()]);
    assert!(out.status.success());
    let tables = apmetric_tools::csvfmt::parse_many(&fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!(tables.len(), 3);
    assert!(tables.iter().all(|t| t.total() == 2521));
}

#[test]
fn scenario_one_scores_perfectly() {
    let dir = TempDir::new().unwrap();
    let out = apscore(&["scenario", "1", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["n_tables"], 1);
    for (key, m) in summary["metrics"].as_object().unwrap() {
        assert!((m["mean"].as_f64().unwrap() - 1.0).abs() < 1e-9, "{key}");
    }
    for name in ["scores.csv", "correlations.csv", "timings.csv", "scatter_f1_ap.csv", "hist_ap.csv", "hist_ars.csv"] {
        assert!(dir.path().join(name).exists(), "{name}");
    }
}

#[test]
fn scenario_artifacts_are_consistent() {
    let dir = TempDir::new().unwrap();
    let out = apscore(&["scenario", "4", "--n", "60", "--seed", "3", "--no-timings", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let scores = fs::read_to_string(dir.path().join("scores.csv")).unwrap();
    assert_eq!(scores.lines().next().unwrap(), "table,ap,ami,ars,fms,completeness,homogeneity,v,f1");
    assert_eq!(scores.lines().count(), 61);
    let hist = fs::read_to_string(dir.path().join("hist_fms.csv")).unwrap();
    assert_eq!(hist.lines().count(), 21);
    let counted: u64 = hist.lines().skip(1).map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(counted, 60);
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let corr = fs::read_to_string(dir.path().join("correlations.csv")).unwrap();
    assert_eq!(corr.lines().count(), 8);
    for line in corr.lines().skip(1) {
        let (key, r) = line.split_once(',').unwrap();
        let r: f64 = r.parse().unwrap();
        assert!(r.abs() <= 1.0);
        assert_eq!(summary["metrics"][key]["correlation_with_ap"].as_f64().unwrap(), r);
    }
    assert!(!dir.path().join("timings.csv").exists());
}

#[test]
fn scenario_out_of_range_is_usage_error() {
    let out = apscore(&["scenario", "9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_scenario_needs_mode_and_shape() {
    let dir = TempDir::new().unwrap();
    let out = apscore(&["scenario", "--shape", "3x3", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let out = apscore(&[
        "scenario", "--shape", "3x5", "--mode", "high", "--n", "20", "--no-timings", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let summary: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["shape"], "3x5");
    assert_eq!(summary["scenario"], Value::Null);
}

#[test]
fn bench_filters_metrics() {
    let dir = TempDir::new().unwrap();
    let out = apscore(&["bench", "--metrics", "ap,f1", "--n", "20", "--reps", "2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", stderr(&out));
    let timings = fs::read_to_string(dir.path().join("timings.csv")).unwrap();
    let keys: Vec<&str> = timings.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(keys, ["ap", "f1"]);
    assert_eq!(stdout(&out).lines().filter(|l| l.contains(" mean ")).count(), 2);
}

#[test]
fn bench_rejects_zero_tables() {
    let out = apscore(&["bench", "--n", "0"]);
    assert_eq!(out.status.code(), Some(2));
}
