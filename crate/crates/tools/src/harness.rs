//! Scenario runs: score every table with all eight metrics, then derive
//! histograms, correlations against AP, and per-metric timings.

use std::hint::black_box;
use std::time::Instant;

use apmetric::scenario::{ScenarioConfig, ScenarioError};
use apmetric::stats::{self, Histogram};
use apmetric::{ContingencyTable, Metric, ScoreSet};
use rayon::prelude::*;

pub const DEFAULT_BINS: usize = 20;
pub const DEFAULT_WARMUP: usize = 10;
pub const DEFAULT_ROUNDS: usize = 3;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("benchmark needs at least one table")]
    NoTables,
    #[error("benchmark needs at least one repetition")]
    ZeroRepetitions,
    #[error("benchmark needs at least one round")]
    ZeroRounds,
    #[error("histogram needs at least one bin")]
    InvalidBins,
}

/// Wall-clock statistics over per-table samples, in microseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingStats {
    pub samples: usize,
    pub mean_us: f64,
    pub median_us: f64,
    pub p95_us: f64,
    pub min_us: f64,
    pub max_us: f64,
}

impl TimingStats {
    /// Summary of raw samples; `None` when empty.
    pub fn from_samples(samples: &[f64]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let median = if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        };
        // nearest-rank percentile
        let p95 = sorted[((0.95 * n as f64).ceil() as usize).clamp(1, n) - 1];
        Some(Self {
            samples: n,
            mean_us: sorted.iter().sum::<f64>() / n as f64,
            median_us: median,
            p95_us: p95,
            min_us: sorted[0],
            max_us: sorted[n - 1],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BenchConfig {
    /// Back-to-back invocations per table; one sample is their mean.
    pub repetitions: usize,
    /// Untimed invocations before measuring.
    pub warmup: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            repetitions: 1,
            warmup: DEFAULT_WARMUP,
        }
    }
}

/// Times `metric` on pre-built tables, single-threaded. Each table yields one
/// sample: the mean duration of `repetitions` consecutive invocations. Metric
/// errors on degenerate tables still count as invocations.
pub fn benchmark(
    metric: Metric,
    tables: &[ContingencyTable],
    config: BenchConfig,
) -> Result<TimingStats, HarnessError> {
    if tables.is_empty() {
        return Err(HarnessError::NoTables);
    }
    if config.repetitions == 0 {
        return Err(HarnessError::ZeroRepetitions);
    }
    for t in tables.iter().cycle().take(config.warmup) {
        let _ = black_box(metric.evaluate(black_box(t)));
    }
    let mut samples = Vec::with_capacity(tables.len());
    for t in tables {
        let start = Instant::now();
        for _ in 0..config.repetitions {
            let _ = black_box(metric.evaluate(black_box(t)));
        }
        let elapsed = start.elapsed().as_secs_f64() * 1e6;
        samples.push(elapsed / config.repetitions as f64);
    }
    Ok(TimingStats::from_samples(&samples).expect("non-empty samples"))
}

/// Times several metrics in `rounds` interleaved passes, rotating which
/// metric goes first, and keeps each metric's pass with the lowest mean.
/// Interleaving spreads frequency ramps and background load across metrics
/// instead of charging them to whichever happens to run first.
pub fn benchmark_rounds(
    metrics: &[Metric],
    tables: &[ContingencyTable],
    config: BenchConfig,
    rounds: usize,
) -> Result<Vec<(Metric, TimingStats)>, HarnessError> {
    if rounds == 0 {
        return Err(HarnessError::ZeroRounds);
    }
    let mut best: Vec<Option<TimingStats>> = vec![None; metrics.len()];
    for round in 0..rounds {
        for k in 0..metrics.len() {
            let idx = (k + round) % metrics.len();
            let t = benchmark(metrics[idx], tables, config)?;
            if best[idx].is_none_or(|b| t.mean_us < b.mean_us) {
                best[idx] = Some(t);
            }
        }
    }
    Ok(metrics
        .iter()
        .zip(best)
        .map(|(&m, t)| (m, t.expect("at least one round")))
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOptions {
    pub bins: usize,
    /// Score tables on the rayon pool.
    pub parallel: bool,
    /// `None` skips timing.
    pub bench: Option<BenchConfig>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            parallel: true,
            bench: Some(BenchConfig::default()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSummary {
    pub metric: Metric,
    pub histogram: Histogram,
    /// Tables on which the metric was undefined.
    pub missing: usize,
    /// Pearson r against AP over tables where both are defined; `None` when
    /// undefined (constant column or fewer than two tables). Not computed
    /// for AP itself.
    pub correlation: Option<f64>,
    pub mean: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub timing: Option<TimingStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioReport {
    pub config: ScenarioConfig,
    pub tables: Vec<ContingencyTable>,
    pub scores: Vec<ScoreSet>,
    /// In [`Metric::ALL`] order.
    pub metrics: Vec<MetricSummary>,
}

impl ScenarioReport {
    pub fn column(&self, metric: Metric) -> Vec<Option<f64>> {
        self.scores.iter().map(|s| s.get(metric)).collect()
    }

    /// Defined values of one metric.
    pub fn values(&self, metric: Metric) -> Vec<f64> {
        self.scores.iter().filter_map(|s| s.get(metric)).collect()
    }

    pub fn summary(&self, metric: Metric) -> &MetricSummary {
        &self.metrics[metric.index()]
    }

    pub fn correlation(&self, metric: Metric) -> Option<f64> {
        self.summary(metric).correlation
    }
}

/// Pearson r between two score columns over rows where both are present.
pub fn paired_correlation(x: &[Option<f64>], y: &[Option<f64>]) -> Option<f64> {
    let (a, b): (Vec<f64>, Vec<f64>) = x
        .iter()
        .zip(y)
        .filter_map(|(a, b)| Some(((*a)?, (*b)?)))
        .unzip();
    stats::pearson(&a, &b).ok()
}

pub fn run_scenario(config: &ScenarioConfig, options: &RunOptions) -> Result<ScenarioReport, HarnessError> {
    if options.bins == 0 {
        return Err(HarnessError::InvalidBins);
    }
    let tables = if options.parallel {
        (0..config.n_tables)
            .into_par_iter()
            .map(|k| config.table(k))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        config.tables()?
    };
    let scores: Vec<ScoreSet> = if options.parallel {
        tables.par_iter().map(ScoreSet::evaluate).collect()
    } else {
        tables.iter().map(ScoreSet::evaluate).collect()
    };

    let ap_column: Vec<Option<f64>> = scores.iter().map(|s| s.get(Metric::Ap)).collect();
    let mut metrics = Vec::with_capacity(Metric::ALL.len());
    for metric in Metric::ALL {
        let column: Vec<Option<f64>> = scores.iter().map(|s| s.get(metric)).collect();
        let values: Vec<f64> = column.iter().flatten().copied().collect();
        let (low, high) = metric.range();
        let histogram =
            stats::histogram(&values, options.bins, low, high).map_err(|_| HarnessError::InvalidBins)?;
        let correlation = match metric {
            Metric::Ap => None,
            _ => paired_correlation(&column, &ap_column),
        };
        let timing = match options.bench {
            Some(bench) if !tables.is_empty() => Some(benchmark(metric, &tables, bench)?),
            _ => None,
        };
        metrics.push(MetricSummary {
            metric,
            missing: column.len() - values.len(),
            correlation,
            mean: (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64),
            min: values.iter().copied().reduce(f64::min),
            max: values.iter().copied().reduce(f64::max),
            histogram,
            timing,
        });
    }
    Ok(ScenarioReport {
        config: config.clone(),
        tables,
        scores,
        metrics,
    })
}
