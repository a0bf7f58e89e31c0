//! CSV and JSON artifacts for scenario and benchmark runs.
//!
//! Numbers are written with Rust's shortest round-trip formatting in both
//! CSV and JSON, so the two carry identical full-precision values. Only the
//! human-readable console output rounds to three decimals.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use apmetric::scenario::TableKind;
use apmetric::stats::Histogram;
use apmetric::tablegen::Mode;
use apmetric::Metric;
use serde_json::{json, Map, Value};

use crate::harness::{ScenarioReport, TimingStats};

/// Rounds half away from zero to three decimals.
pub fn round3(x: f64) -> f64 {
    (x * 1000.0).round() / 1000.0
}

/// Three-decimal presentation string.
pub fn fmt3(x: f64) -> String {
    let r = round3(x);
    // avoid "-0.000"
    format!("{:.3}", if r == 0.0 { 0.0 } else { r })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn scores_csv(report: &ScenarioReport) -> String {
    let mut out = String::from("table");
    for m in Metric::ALL {
        write!(out, ",{}", m.key()).unwrap();
    }
    out.push('\n');
    for (k, s) in report.scores.iter().enumerate() {
        write!(out, "{k}").unwrap();
        for v in s.values {
            write!(out, ",{}", opt(v)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn histogram_csv(h: &Histogram) -> String {
    let mut out = String::from("bin_left,bin_right,count\n");
    for (lo, hi, c) in h.bins() {
        writeln!(out, "{lo},{hi},{c}").unwrap();
    }
    out
}

pub fn correlations_csv(report: &ScenarioReport) -> String {
    let mut out = String::from("metric,r\n");
    for s in report.metrics.iter().filter(|s| s.metric != Metric::Ap) {
        writeln!(out, "{},{}", s.metric.key(), opt(s.correlation)).unwrap();
    }
    out
}

pub fn timings_csv<'a>(rows: impl IntoIterator<Item = (Metric, &'a TimingStats)>) -> String {
    let mut out = String::from("metric,mean_us,median_us,p95_us,min_us,max_us\n");
    for (m, t) in rows {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            m.key(),
            t.mean_us,
            t.median_us,
            t.p95_us,
            t.min_us,
            t.max_us
        )
        .unwrap();
    }
    out
}

pub fn scatter_csv(report: &ScenarioReport, x: Metric, y: Metric) -> String {
    let mut out = format!("table,{},{}\n", x.key(), y.key());
    for (k, s) in report.scores.iter().enumerate() {
        writeln!(out, "{k},{},{}", opt(s.get(x)), opt(s.get(y))).unwrap();
    }
    out
}

fn timing_json(t: &TimingStats) -> Value {
    json!({
        "samples": t.samples,
        "mean_us": t.mean_us,
        "median_us": t.median_us,
        "p95_us": t.p95_us,
        "min_us": t.min_us,
        "max_us": t.max_us,
    })
}

pub fn kind_name(kind: TableKind) -> &'static str {
    match kind {
        TableKind::Ideal => "ideal",
        TableKind::Worst => "worst",
        TableKind::Random(Mode::Low) => "low",
        TableKind::Random(Mode::High) => "high",
    }
}

pub fn summary_json(report: &ScenarioReport) -> Value {
    let c = &report.config;
    let mut metrics = Map::new();
    for s in &report.metrics {
        metrics.insert(
            s.metric.key().to_string(),
            json!({
                "mean": s.mean,
                "min": s.min,
                "max": s.max,
                "missing": s.missing,
                "correlation_with_ap": s.correlation,
                "timing": s.timing.as_ref().map(timing_json),
            }),
        );
    }
    json!({
        "scenario": c.id,
        "shape": format!("{}x{}", c.rows, c.cols),
        "mode": kind_name(c.kind),
        "n_tables": report.scores.len(),
        "total": c.total,
        "master_seed": c.master_seed,
        "metrics": metrics,
    })
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(path)
}

/// Writes the full artifact set into `dir`, creating it if needed.
pub fn write_scenario(report: &ScenarioReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let mut written = vec![write(dir, "scores.csv", &scores_csv(report))?];
    for s in &report.metrics {
        written.push(write(
            dir,
            &format!("hist_{}.csv", s.metric.key()),
            &histogram_csv(&s.histogram),
        )?);
    }
    written.push(write(dir, "correlations.csv", &correlations_csv(report))?);
    let timings: Vec<(Metric, &TimingStats)> = report
        .metrics
        .iter()
        .filter_map(|s| Some((s.metric, s.timing.as_ref()?)))
        .collect();
    if !timings.is_empty() {
        written.push(write(dir, "timings.csv", &timings_csv(timings))?);
    }
    written.push(write(dir, "scatter_f1_ap.csv", &scatter_csv(report, Metric::F1, Metric::Ap))?);
    let summary = serde_json::to_string_pretty(&summary_json(report))?;
    written.push(write(dir, "summary.json", &summary)?);
    Ok(written)
}

/// Writes `timings.csv` for a benchmark run into `dir`.
pub fn write_timings(rows: &[(Metric, TimingStats)], dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    write(dir, "timings.csv", &timings_csv(rows.iter().map(|(m, t)| (*m, t))))
}
