//! Associativity, peakiness and their harmonic mean (AP), plus the F1
//! contingency metric built from truth-class accuracy and cluster purity.
//!
//! Associativity looks only at where each truth class peaks: take the
//! column of the largest count in every row and ask what fraction of row
//! pairs peak in different columns. A one-to-one matching scores 1, every
//! class peaking in the same cluster scores 0.
//!
//! Peakiness asks how much each row's peak stands out:
//! `(largest - second largest) / largest`, averaged over rows. Rows that are
//! entirely zero have no peak and by default are left out of the mean.

use alloc::vec::Vec;
use smallvec::SmallVec;

use crate::metric::MetricError;
use crate::table::ContingencyTable;

/// How a row with no samples enters the peakiness mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroRowPolicy {
    /// Leave the row out of the mean.
    #[default]
    Exclude,
    /// Count the row as peakiness 0, like a row whose top two values tie.
    Zero,
}

/// Associativity, per-row peakiness and AP for one table.
#[derive(Debug, Clone, PartialEq)]
pub struct ApBreakdown {
    pub associativity: f64,
    /// Column index of the largest count in each row (lowest index on ties).
    pub row_argmax: Vec<usize>,
    /// `(row index, peakiness)` for every row that entered the mean.
    pub per_row_peakiness: Vec<(usize, f64)>,
    pub peakiness: f64,
    pub ap: f64,
    /// All-zero rows.
    pub excluded_rows: Vec<usize>,
}

/// Truth-class accuracy, cluster purity and F1 for one table.
#[derive(Debug, Clone, PartialEq)]
pub struct F1Breakdown {
    /// `(row index, max / row sum)` for every non-empty row.
    pub per_row_accuracy: Vec<(usize, f64)>,
    /// `(column index, max / column sum)` for every non-empty column.
    pub per_col_purity: Vec<(usize, f64)>,
    pub truth_class_accuracy: f64,
    pub cluster_purity: f64,
    pub f1: f64,
    pub excluded_rows: Vec<usize>,
    pub excluded_cols: Vec<usize>,
}

/// Harmonic mean of two scores in [0, 1], taken as 0 when either is 0.
#[inline]
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Largest value, its first index, and the second largest value counting
/// repeats (so `[5, 5, 1]` gives 5 and 5).
#[inline]
fn top_two(values: impl Iterator<Item = u64>) -> (u64, usize, u64) {
    let (mut first, mut at, mut second) = (0u64, 0usize, 0u64);
    // branch-free so random tables do not pay for mispredictions
    for (j, v) in values.enumerate() {
        let beats = v > first;
        at = if beats { j } else { at };
        second = second.max(v.min(first));
        first = first.max(v);
    }
    (first, at, second)
}

#[inline]
fn peak_ratio(first: u64, second: u64) -> f64 {
    (first - second) as f64 / first as f64
}

fn check_rows(table: &ContingencyTable) -> Result<(), MetricError> {
    if table.total() == 0 {
        return Err(MetricError::ZeroTotal);
    }
    if table.rows() < 2 {
        return Err(MetricError::TooFewRows(table.rows()));
    }
    Ok(())
}

fn check_cols(table: &ContingencyTable) -> Result<(), MetricError> {
    if table.total() == 0 {
        return Err(MetricError::ZeroTotal);
    }
    if table.cols() < 2 {
        return Err(MetricError::TooFewColumns(table.cols()));
    }
    Ok(())
}

/// Fraction of distinct row pairs whose peak columns differ, counted by
/// grouping rows on their peak column.
fn associativity_of(argmax: &mut [usize]) -> f64 {
    let r = argmax.len() as u64;
    let pairs = r * (r - 1) / 2;
    argmax.sort_unstable();
    let mut equal = 0u64;
    let mut run = 1u64;
    for w in argmax.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            equal += run * (run - 1) / 2;
            run = 1;
        }
    }
    equal += run * (run - 1) / 2;
    (pairs - equal) as f64 / pairs as f64
}

/// Column index of the largest count in a row, lowest index on ties.
pub fn row_argmax(row: &[u64]) -> usize {
    top_two(row.iter().copied()).1
}

pub fn associativity(table: &ContingencyTable) -> Result<f64, MetricError> {
    check_rows(table)?;
    let mut argmax: SmallVec<[usize; 16]> = table.iter_rows().map(row_argmax).collect();
    Ok(associativity_of(&mut argmax))
}

/// Peakiness of one row, or `None` for an all-zero row.
pub fn row_peakiness(row: &[u64]) -> Result<Option<f64>, MetricError> {
    if row.len() < 2 {
        return Err(MetricError::RowTooShort(row.len()));
    }
    let (first, _, second) = top_two(row.iter().copied());
    Ok((first > 0).then(|| peak_ratio(first, second)))
}

pub fn peakiness(table: &ContingencyTable, policy: ZeroRowPolicy) -> Result<f64, MetricError> {
    check_cols(table)?;
    let (mut sum, mut n) = (0.0, 0usize);
    for row in table.iter_rows() {
        match row_peakiness(row)? {
            Some(p) => {
                sum += p;
                n += 1;
            }
            None if policy == ZeroRowPolicy::Zero => n += 1,
            None => {}
        }
    }
    if n == 0 {
        return Err(MetricError::AllRowsZero);
    }
    Ok(sum / n as f64)
}

/// Full AP evaluation with every intermediate exposed.
pub fn ap_score(table: &ContingencyTable, policy: ZeroRowPolicy) -> Result<ApBreakdown, MetricError> {
    check_rows(table)?;
    check_cols(table)?;
    let mut row_argmax = Vec::with_capacity(table.rows());
    let mut per_row_peakiness = Vec::with_capacity(table.rows());
    let mut excluded_rows = Vec::new();
    let mut sum = 0.0;
    let mut n = 0usize;
    for (i, row) in table.iter_rows().enumerate() {
        let (first, at, second) = top_two(row.iter().copied());
        row_argmax.push(at);
        if first == 0 {
            excluded_rows.push(i);
            if policy == ZeroRowPolicy::Zero {
                per_row_peakiness.push((i, 0.0));
                n += 1;
            }
        } else {
            let p = peak_ratio(first, second);
            per_row_peakiness.push((i, p));
            sum += p;
            n += 1;
        }
    }
    let peakiness = sum / n as f64;
    let mut scratch = row_argmax.clone();
    let associativity = associativity_of(&mut scratch);
    Ok(ApBreakdown {
        associativity,
        row_argmax,
        per_row_peakiness,
        peakiness,
        ap: harmonic_mean(associativity, peakiness),
        excluded_rows,
    })
}

/// AP alone, without collecting the breakdown. Single pass over the cells;
/// tables with more than 16 truth classes go through [`ap_score`].
#[inline]
pub fn ap_value(table: &ContingencyTable, policy: ZeroRowPolicy) -> Result<f64, MetricError> {
    const INLINE_ROWS: usize = 16;
    let rows = table.rows();
    if rows > INLINE_ROWS {
        return ap_score(table, policy).map(|b| b.ap);
    }
    let mut argmax = [0usize; INLINE_ROWS];
    let (mut sum, mut defined, mut equal_pairs) = (0.0, 0usize, 0u64);
    for (i, row) in table.iter_rows().enumerate() {
        let (first, at, second) = top_two(row.iter().copied());
        if first > 0 {
            sum += peak_ratio(first, second);
            defined += 1;
        }
        equal_pairs += argmax[..i].iter().filter(|&&a| a == at).count() as u64;
        argmax[i] = at;
    }
    if defined == 0 {
        return Err(MetricError::ZeroTotal);
    }
    if rows < 2 {
        return Err(MetricError::TooFewRows(rows));
    }
    if table.cols() < 2 {
        return Err(MetricError::TooFewColumns(table.cols()));
    }
    let n = match policy {
        ZeroRowPolicy::Exclude => defined,
        ZeroRowPolicy::Zero => rows,
    };
    let pairs = (rows * (rows - 1) / 2) as u64;
    let a = (pairs - equal_pairs) as f64 / pairs as f64;
    Ok(harmonic_mean(a, sum / n as f64))
}

fn max_over_sum_mean<I, R>(lines: I) -> (f64, Vec<(usize, f64)>, Vec<usize>)
where
    I: Iterator<Item = R>,
    R: Iterator<Item = u64>,
{
    let mut kept = Vec::new();
    let mut excluded = Vec::new();
    for (k, line) in lines.enumerate() {
        let (max, sum) = line.fold((0u64, 0u64), |(m, s), v| (m.max(v), s + v));
        if sum == 0 {
            excluded.push(k);
        } else {
            kept.push((k, max as f64 / sum as f64));
        }
    }
    let mean = kept.iter().map(|&(_, v)| v).sum::<f64>() / kept.len() as f64;
    (mean, kept, excluded)
}

/// Mean over non-empty rows of (largest count / row sum).
pub fn truth_class_accuracy(table: &ContingencyTable) -> Result<f64, MetricError> {
    table.require_samples()?;
    Ok(max_over_sum_mean(table.iter_rows().map(|r| r.iter().copied())).0)
}

/// Mean over non-empty columns of (largest count / column sum).
pub fn cluster_purity(table: &ContingencyTable) -> Result<f64, MetricError> {
    table.require_samples()?;
    Ok(max_over_sum_mean((0..table.cols()).map(|j| table.column(j))).0)
}

pub fn f1_score(table: &ContingencyTable) -> Result<F1Breakdown, MetricError> {
    table.require_samples()?;
    let (tca, per_row_accuracy, excluded_rows) =
        max_over_sum_mean(table.iter_rows().map(|r| r.iter().copied()));
    let (purity, per_col_purity, excluded_cols) =
        max_over_sum_mean((0..table.cols()).map(|j| table.column(j)));
    Ok(F1Breakdown {
        per_row_accuracy,
        per_col_purity,
        truth_class_accuracy: tca,
        cluster_purity: purity,
        f1: harmonic_mean(tca, purity),
        excluded_rows,
        excluded_cols,
    })
}

/// F1 alone, without collecting the breakdown.
#[inline]
pub fn f1_value(table: &ContingencyTable) -> Result<f64, MetricError> {
    table.require_samples()?;
    let counts = table.counts();
    let cols = table.cols();
    let (mut row_acc, mut rows_kept) = (0.0, 0usize);
    for row in counts.chunks_exact(cols) {
        let (max, sum) = row.iter().fold((0u64, 0u64), |(m, s), &v| (m.max(v), s + v));
        if sum > 0 {
            row_acc += max as f64 / sum as f64;
            rows_kept += 1;
        }
    }
    let (mut col_acc, mut cols_kept) = (0.0, 0usize);
    for j in 0..cols {
        let (max, sum) = counts[j..]
            .iter()
            .step_by(cols)
            .fold((0u64, 0u64), |(m, s), &v| (m.max(v), s + v));
        if sum > 0 {
            col_acc += max as f64 / sum as f64;
            cols_kept += 1;
        }
    }
    Ok(harmonic_mean(
        row_acc / rows_kept as f64,
        col_acc / cols_kept as f64,
    ))
}
