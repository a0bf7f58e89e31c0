//! `apscore` command-line front end.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use apmetric::ap::{self, ZeroRowPolicy};
use apmetric::refmetrics;
use apmetric::scenario::{ScenarioConfig, TableKind, DEFAULT_TABLES, DEFAULT_TOTAL};
use apmetric::tablegen::{self, GenSpec, Mode, DEFAULT_ZERO_WEIGHT};
use apmetric::{ContingencyTable, Metric};
use clap::builder::TypedValueParser as _;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::csvfmt;
use crate::harness::{self, BenchConfig, RunOptions};
use crate::report;

#[derive(Debug, Parser)]
#[command(name = "apscore", version, about = "Contingency-table clustering metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score one contingency table read from a CSV file.
    Score(ScoreArgs),
    /// Generate random contingency tables.
    Gen(GenArgs),
    /// Run a built-in (1-6) or custom scenario and write its reports.
    Scenario(ScenarioArgs),
    /// Time each metric on a batch of generated tables.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZeroRows {
    Exclude,
    Zero,
}

impl From<ZeroRows> for ZeroRowPolicy {
    fn from(z: ZeroRows) -> Self {
        match z {
            ZeroRows::Exclude => ZeroRowPolicy::Exclude,
            ZeroRows::Zero => ZeroRowPolicy::Zero,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenMode {
    Low,
    High,
}

impl From<GenMode> for Mode {
    fn from(m: GenMode) -> Self {
        match m {
            GenMode::Low => Mode::Low,
            GenMode::High => Mode::High,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioMode {
    Ideal,
    Worst,
    Low,
    High,
}

impl From<ScenarioMode> for TableKind {
    fn from(m: ScenarioMode) -> Self {
        match m {
            ScenarioMode::Ideal => TableKind::Ideal,
            ScenarioMode::Worst => TableKind::Worst,
            ScenarioMode::Low => TableKind::Random(Mode::Low),
            ScenarioMode::High => TableKind::Random(Mode::High),
        }
    }
}

/// `RxC` table shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub rows: usize,
    pub cols: usize,
}

impl FromStr for Shape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (r, c) = s
            .split_once(['x', 'X'])
            .ok_or_else(|| format!("shape `{s}` is not of the form RxC"))?;
        let rows: usize = r.trim().parse().map_err(|_| format!("bad row count in `{s}`"))?;
        let cols: usize = c.trim().parse().map_err(|_| format!("bad column count in `{s}`"))?;
        Ok(Shape { rows, cols })
    }
}

/// One line of `score` output: a metric or one of the AP/F1 components.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScoreItem {
    Metric(Metric),
    Associativity,
    Peakiness,
    TruthClassAccuracy,
    ClusterPurity,
}

impl ScoreItem {
    pub const DEFAULT: [ScoreItem; 12] = [
        ScoreItem::Metric(Metric::Ap),
        ScoreItem::Associativity,
        ScoreItem::Peakiness,
        ScoreItem::Metric(Metric::F1),
        ScoreItem::TruthClassAccuracy,
        ScoreItem::ClusterPurity,
        ScoreItem::Metric(Metric::Ami),
        ScoreItem::Metric(Metric::Ars),
        ScoreItem::Metric(Metric::Fms),
        ScoreItem::Metric(Metric::Completeness),
        ScoreItem::Metric(Metric::Homogeneity),
        ScoreItem::Metric(Metric::VMeasure),
    ];

    pub fn key(self) -> &'static str {
        match self {
            ScoreItem::Metric(m) => m.key(),
            ScoreItem::Associativity => "a",
            ScoreItem::Peakiness => "p",
            ScoreItem::TruthClassAccuracy => "tca",
            ScoreItem::ClusterPurity => "purity",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            ScoreItem::Metric(m) => m.label(),
            ScoreItem::Associativity => "A",
            ScoreItem::Peakiness => "P",
            ScoreItem::TruthClassAccuracy => "TCA",
            ScoreItem::ClusterPurity => "Purity",
        }
    }
}

impl FromStr for ScoreItem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "a" | "associativity" => Ok(ScoreItem::Associativity),
            "p" | "peakiness" => Ok(ScoreItem::Peakiness),
            "tca" | "truth-class-accuracy" => Ok(ScoreItem::TruthClassAccuracy),
            "purity" | "cluster-purity" => Ok(ScoreItem::ClusterPurity),
            other => other
                .parse::<Metric>()
                .map(ScoreItem::Metric)
                .map_err(|_| format!("unknown metric `{s}`")),
        }
    }
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|_| format!("unknown metric `{s}`"))
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// CSV table: rows are truth classes, columns are clusters.
    pub file: PathBuf,
    /// Comma-separated metrics (ap, a, p, f1, tca, purity, ami, ars, fms,
    /// completeness, homogeneity, v). Default: all.
    #[arg(long, value_delimiter = ',')]
    pub metrics: Vec<ScoreItem>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// V-measure weight.
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// How all-zero rows enter peakiness.
    #[arg(long, value_enum, default_value_t = ZeroRows::Exclude)]
    pub zero_rows: ZeroRows,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, default_value = "4x4")]
    pub shape: Shape,
    #[arg(long, value_enum, default_value_t = GenMode::Low)]
    pub mode: GenMode,
    /// Number of tables.
    #[arg(long = "n", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    #[arg(long, default_value_t = DEFAULT_TOTAL)]
    pub total: u64,
    #[arg(long, env = "APSCORE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Relative weight of the divider 0 in high mode.
    #[arg(long, default_value_t = DEFAULT_ZERO_WEIGHT)]
    pub zero_weight: f64,
    /// Directory for table_<k>.csv files.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Write all tables to this single file, blank-line separated, instead.
    #[arg(long)]
    pub concat: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Built-in scenario: 1 ideal 4x4, 2 worst 4x4, 3 low 4x4, 4 high 4x4,
    /// 5 high 4x6, 6 high 4x2. Omit to run a custom scenario.
    #[arg(value_parser = clap::value_parser!(u32).range(1..=6))]
    pub id: Option<u32>,
    #[arg(long)]
    pub shape: Option<Shape>,
    #[arg(long, value_enum)]
    pub mode: Option<ScenarioMode>,
    #[arg(long = "n", value_parser = clap::value_parser!(u64).range(1..))]
    pub count: Option<u64>,
    #[arg(long)]
    pub total: Option<u64>,
    #[arg(long, env = "APSCORE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub zero_weight: Option<f64>,
    /// Output directory. Default: scenario-<id> or scenario-custom.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = harness::DEFAULT_BINS, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub bins: usize,
    /// Timed invocations per table.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub reps: usize,
    #[arg(long, default_value_t = harness::DEFAULT_WARMUP)]
    pub warmup: usize,
    /// Skip the timing pass.
    #[arg(long)]
    pub no_timings: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, default_value = "4x4")]
    pub shape: Shape,
    #[arg(long, value_enum, default_value_t = ScenarioMode::Low)]
    pub mode: ScenarioMode,
    #[arg(long = "n", default_value_t = DEFAULT_TABLES as u64, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    #[arg(long, default_value_t = DEFAULT_TOTAL)]
    pub total: u64,
    #[arg(long, env = "APSCORE_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Back-to-back invocations per table; each sample is their mean.
    #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub reps: usize,
    #[arg(long, default_value_t = harness::DEFAULT_WARMUP)]
    pub warmup: usize,
    /// Interleaved timing passes; each metric reports its fastest pass.
    #[arg(long, default_value_t = harness::DEFAULT_ROUNDS, value_parser = clap::value_parser!(u64).range(1..).map(|v| v as usize))]
    pub rounds: usize,
    /// Comma-separated metric subset. Default: all eight.
    #[arg(long, value_delimiter = ',', value_parser = parse_metric)]
    pub metrics: Vec<Metric>,
    /// Directory for timings.csv.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Parses arguments and runs; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Score(a) => cmd_score(&a),
        Command::Gen(a) => cmd_gen(&a),
        Command::Scenario(a) => cmd_scenario(&a),
        Command::Bench(a) => cmd_bench(&a),
    }
}

fn read_table(path: &Path) -> Result<ContingencyTable> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    csvfmt::parse_csv(&text).with_context(|| format!("{}", path.display()))
}

/// Computes the requested score items, failing on the first metric error.
pub fn score_items(
    table: &ContingencyTable,
    items: &[ScoreItem],
    beta: f64,
    policy: ZeroRowPolicy,
) -> Result<Vec<(ScoreItem, f64)>> {
    if !(beta > 0.0 && beta.is_finite()) {
        bail!("--beta must be positive");
    }
    items
        .iter()
        .map(|&item| {
            let value = match item {
                ScoreItem::Metric(Metric::Ap) => ap::ap_value(table, policy),
                ScoreItem::Metric(Metric::VMeasure) => refmetrics::v_measure(table, beta),
                ScoreItem::Metric(m) => m.evaluate(table),
                ScoreItem::Associativity => ap::associativity(table),
                ScoreItem::Peakiness => ap::peakiness(table, policy),
                ScoreItem::TruthClassAccuracy => ap::truth_class_accuracy(table),
                ScoreItem::ClusterPurity => ap::cluster_purity(table),
            };
            value
                .map(|v| (item, v))
                .map_err(|e| anyhow!("{}: {e}", item.label()))
        })
        .collect()
}

pub fn render_scores(scores: &[(ScoreItem, f64)], format: Format) -> String {
    match format {
        Format::Text => {
            let width = scores.iter().map(|(i, _)| i.label().len()).max().unwrap_or(0);
            let mut out = String::new();
            for (item, v) in scores {
                writeln!(out, "{:<width$} {}", item.label(), report::fmt3(*v)).unwrap();
            }
            out
        }
        Format::Csv => {
            let mut out = String::from("metric,value\n");
            for (item, v) in scores {
                writeln!(out, "{},{v}", item.key()).unwrap();
            }
            out
        }
        Format::Json => {
            let map: Map<String, Value> = scores
                .iter()
                .map(|(item, v)| (item.key().to_string(), json!(v)))
                .collect();
            let mut s = serde_json::to_string_pretty(&Value::Object(map)).unwrap();
            s.push('\n');
            s
        }
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_score(a: &ScoreArgs) -> Result<()> {
    let table = read_table(&a.file)?;
    let items: &[ScoreItem] = if a.metrics.is_empty() {
        &ScoreItem::DEFAULT
    } else {
        &a.metrics
    };
    let scores = score_items(&table, items, a.beta, a.zero_rows.into())?;
    emit(&render_scores(&scores, a.format), a.output.as_deref())
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let spec = GenSpec {
        rows: a.shape.rows,
        cols: a.shape.cols,
        total: a.total,
        mode: a.mode.into(),
        zero_weight: a.zero_weight,
        seed: a.seed,
    };
    spec.validate()?;
    let tables = (0..a.count)
        .map(|k| tablegen::generate_indexed(&spec, k))
        .collect::<Result<Vec<_>, _>>()?;
    match &a.concat {
        Some(path) => {
            fs::write(path, csvfmt::serialize_many(&tables))
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => {
            fs::create_dir_all(&a.out).with_context(|| format!("cannot create {}", a.out.display()))?;
            for (k, t) in tables.iter().enumerate() {
                let path = a.out.join(format!("table_{k}.csv"));
                fs::write(&path, csvfmt::serialize_csv(t))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
    }
    Ok(())
}

fn scenario_config(a: &ScenarioArgs) -> Result<ScenarioConfig> {
    let mut cfg = match a.id {
        Some(id) => ScenarioConfig::builtin(id, a.seed)?,
        None => {
            let (Some(shape), Some(mode)) = (a.shape, a.mode) else {
                bail!("a custom scenario needs --shape and --mode (or give a scenario id 1-6)");
            };
            let n = match (mode, a.count) {
                (_, Some(n)) => n as usize,
                (ScenarioMode::Ideal | ScenarioMode::Worst, None) => 1,
                (_, None) => bail!("a custom random scenario needs --n"),
            };
            ScenarioConfig::custom(shape.rows, shape.cols, mode.into(), n, a.total.unwrap_or(DEFAULT_TOTAL), a.seed)
        }
    };
    if a.id.is_some() {
        if let Some(shape) = a.shape {
            cfg.rows = shape.rows;
            cfg.cols = shape.cols;
        }
        if let Some(mode) = a.mode {
            cfg.kind = mode.into();
        }
        if let Some(n) = a.count {
            cfg.n_tables = n as usize;
        }
        if let Some(total) = a.total {
            cfg.total = total;
        }
    }
    if let Some(w) = a.zero_weight {
        cfg.zero_weight = w;
    }
    if let Some(spec) = cfg.gen_spec() {
        spec.validate()?;
    }
    Ok(cfg)
}

fn cmd_scenario(a: &ScenarioArgs) -> Result<()> {
    let cfg = scenario_config(a)?;
    let options = RunOptions {
        bins: a.bins,
        parallel: true,
        bench: (!a.no_timings).then_some(BenchConfig {
            repetitions: a.reps,
            warmup: a.warmup,
        }),
    };
    let rep = harness::run_scenario(&cfg, &options)?;
    let dir = a.out.clone().unwrap_or_else(|| match cfg.id {
        Some(id) => PathBuf::from(format!("scenario-{id}")),
        None => PathBuf::from("scenario-custom"),
    });
    report::write_scenario(&rep, &dir)?;

    println!(
        "scenario {} ({} {}x{}, {} tables, total {}, seed {})",
        cfg.id.map_or("custom".to_string(), |i| i.to_string()),
        report::kind_name(cfg.kind),
        cfg.rows,
        cfg.cols,
        rep.scores.len(),
        cfg.total,
        cfg.master_seed
    );
    println!("{:<13} {:>6} {:>6} {:>6} {:>8} {:>7}", "metric", "mean", "min", "max", "r_vs_AP", "missing");
    let f = |x: Option<f64>| x.map_or("-".to_string(), report::fmt3);
    for s in &rep.metrics {
        println!(
            "{:<13} {:>6} {:>6} {:>6} {:>8} {:>7}",
            s.metric.label(),
            f(s.mean),
            f(s.min),
            f(s.max),
            f(s.correlation),
            s.missing
        );
    }
    println!("reports written to {}", dir.display());
    Ok(())
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let cfg = ScenarioConfig::custom(
        a.shape.rows,
        a.shape.cols,
        a.mode.into(),
        a.count as usize,
        a.total,
        a.seed,
    );
    if let Some(spec) = cfg.gen_spec() {
        spec.validate()?;
    }
    let tables = cfg.tables()?;
    let metrics: &[Metric] = if a.metrics.is_empty() {
        &Metric::ALL
    } else {
        &a.metrics
    };
    let bench = BenchConfig {
        repetitions: a.reps,
        warmup: a.warmup,
    };
    let rows = harness::benchmark_rounds(metrics, &tables, bench, a.rounds)?;
    let path = report::write_timings(&rows, &a.out)?;
    let mut ranked = rows.clone();
    ranked.sort_by(|x, y| x.1.mean_us.total_cmp(&y.1.mean_us));
    for (k, (m, t)) in ranked.iter().enumerate() {
        println!(
            "{:>2}. {:<13} mean {:>10.3} us  median {:>10.3} us  p95 {:>10.3} us",
            k + 1,
            m.label(),
            t.mean_us,
            t.median_us,
            t.p95_us
        );
    }
    println!("timings written to {}", path.display());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_parse() {
        assert_eq!("4x6".parse::<Shape>().unwrap(), Shape { rows: 4, cols: 6 });
        assert!("4by6".parse::<Shape>().is_err());
    }

    #[test]
    fn score_items_parse() {
        assert_eq!("ap".parse::<ScoreItem>().unwrap(), ScoreItem::Metric(Metric::Ap));
        assert_eq!("TCA".parse::<ScoreItem>().unwrap(), ScoreItem::TruthClassAccuracy);
        assert!("nmi".parse::<ScoreItem>().is_err());
    }

    #[test]
    fn unknown_metric_rejected_before_work() {
        let r = Cli::try_parse_from(["apscore", "bench", "--metrics", "ap,nope"]);
        assert!(r.is_err());
    }

    #[test]
    fn scenario_id_range_checked() {
        assert!(Cli::try_parse_from(["apscore", "scenario", "9"]).is_err());
        assert!(Cli::try_parse_from(["apscore", "scenario", "6"]).is_ok());
    }
}
