//! Pair-counting and information-theoretic comparison metrics, computed in
//! closed form from the contingency table.
//!
//! Pair counts come from binomial sums over cells and marginals, so no sample
//! pair is ever enumerated. Entropies use natural logarithms; every score
//! reported here is a ratio, so the unit cancels.

use alloc::vec::Vec;
use smallvec::SmallVec;

use crate::metric::MetricError;
use crate::table::ContingencyTable;

type Marginal = SmallVec<[u64; 16]>;

fn marginals(table: &ContingencyTable) -> (Marginal, Marginal) {
    let mut rows = Marginal::with_capacity(table.rows());
    let mut cols: Marginal = smallvec::smallvec![0; table.cols()];
    for row in table.iter_rows() {
        let mut s = 0;
        for (c, &v) in cols.iter_mut().zip(row) {
            *c += v;
            s += v;
        }
        rows.push(s);
    }
    (rows, cols)
}

#[inline]
fn choose2(n: u64) -> u64 {
    n * n.saturating_sub(1) / 2
}

/// Classification of every unordered sample pair by whether its two samples
/// share a truth class and whether they share a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub n: u64,
    /// Same class, same cluster (TP).
    pub same_same: u64,
    /// Same class, different clusters (FP).
    pub same_diff: u64,
    /// Different classes, same cluster (FN).
    pub diff_same: u64,
    /// Different classes, different clusters.
    pub diff_diff: u64,
    pub n_pairs: u64,
}

impl PairCounts {
    pub fn true_positive(&self) -> u64 {
        self.same_same
    }

    pub fn false_positive(&self) -> u64 {
        self.same_diff
    }

    pub fn false_negative(&self) -> u64 {
        self.diff_same
    }
}

pub fn pair_counts(table: &ContingencyTable) -> Result<PairCounts, MetricError> {
    let (rows, cols) = marginals(table);
    let n: u64 = rows.iter().sum();
    if n < 2 {
        return Err(MetricError::TooFewSamples(n));
    }
    let same_same: u64 = table.counts().iter().map(|&v| choose2(v)).sum();
    let same_class: u64 = rows.iter().map(|&v| choose2(v)).sum();
    let same_cluster: u64 = cols.iter().map(|&v| choose2(v)).sum();
    let n_pairs = choose2(n);
    let same_diff = same_class - same_same;
    let diff_same = same_cluster - same_same;
    Ok(PairCounts {
        n,
        same_same,
        same_diff,
        diff_same,
        diff_diff: n_pairs - same_same - same_diff - diff_same,
        n_pairs,
    })
}

/// Fraction of sample pairs on which truth and prediction agree.
pub fn rand_score(table: &ContingencyTable) -> Result<f64, MetricError> {
    let p = pair_counts(table)?;
    Ok((p.same_same + p.diff_diff) as f64 / p.n_pairs as f64)
}

/// Rand index corrected for chance under the permutation model. Returns 1
/// when the expected and maximum index coincide.
pub fn adjusted_rand_score(table: &ContingencyTable) -> Result<f64, MetricError> {
    let p = pair_counts(table)?;
    let index = p.same_same as f64;
    let same_class = (p.same_same + p.same_diff) as f64;
    let same_cluster = (p.same_same + p.diff_same) as f64;
    let expected = (p.same_same + p.same_diff) as u128 * (p.same_same + p.diff_same) as u128;
    let expected = expected as f64 / p.n_pairs as f64;
    let max_index = 0.5 * (same_class + same_cluster);
    let denom = max_index - expected;
    if denom == 0.0 {
        return Ok(1.0);
    }
    Ok((index - expected) / denom)
}

/// Geometric mean of pairwise precision and recall; 0 when either is
/// undefined.
pub fn fowlkes_mallows(table: &ContingencyTable) -> Result<f64, MetricError> {
    let p = pair_counts(table)?;
    let a = p.same_same + p.same_diff;
    let b = p.same_same + p.diff_same;
    if a == 0 || b == 0 {
        return Ok(0.0);
    }
    Ok(p.same_same as f64 / libm::sqrt(a as f64) / libm::sqrt(b as f64))
}

/// `ln(k!)` for `k` in `0..=n`, accumulated with compensated summation.
#[derive(Debug, Clone)]
pub struct LogFactorials {
    values: Vec<f64>,
}

impl LogFactorials {
    pub fn new(n: u64) -> Self {
        let n = n as usize;
        let mut values = Vec::with_capacity(n + 1);
        values.push(0.0);
        let (mut sum, mut carry) = (0.0f64, 0.0f64);
        for k in 1..=n {
            // Neumaier summation keeps ln(n!) accurate to a few ulps
            let term = libm::log(k as f64);
            let t = sum + term;
            if libm::fabs(sum) >= libm::fabs(term) {
                carry += (sum - t) + term;
            } else {
                carry += (term - t) + sum;
            }
            sum = t;
            values.push(sum + carry);
        }
        Self { values }
    }

    pub fn max(&self) -> u64 {
        (self.values.len() - 1) as u64
    }

    #[inline]
    pub fn ln_factorial(&self, k: u64) -> f64 {
        self.values[k as usize]
    }
}

/// Marginal, conditional and mutual entropies plus the expected mutual
/// information under random relabeling with fixed marginals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyStats {
    pub h_truth: f64,
    pub h_pred: f64,
    pub h_truth_given_pred: f64,
    pub h_pred_given_truth: f64,
    pub mi: f64,
    pub emi: f64,
}

#[inline]
fn plogp_neg(count: u64, total: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        let p = count as f64 / total;
        -p * libm::log(p)
    }
}

fn marginal_entropy(marginal: &[u64], n: f64) -> f64 {
    marginal.iter().map(|&v| plogp_neg(v, n)).sum()
}

/// H(truth | pred) as `-sum p_ij ln(n_ij / b_j)`.
fn h_truth_given_pred(table: &ContingencyTable, cols: &[u64], n: f64) -> f64 {
    let mut h = 0.0;
    for row in table.iter_rows() {
        for (&v, &b) in row.iter().zip(cols) {
            if v > 0 {
                h -= (v as f64 / n) * libm::log(v as f64 / b as f64);
            }
        }
    }
    h
}

/// H(pred | truth) as `-sum p_ij ln(n_ij / a_i)`.
fn h_pred_given_truth(table: &ContingencyTable, rows: &[u64], n: f64) -> f64 {
    let mut h = 0.0;
    for (row, &a) in table.iter_rows().zip(rows) {
        for &v in row {
            if v > 0 {
                h -= (v as f64 / n) * libm::log(v as f64 / a as f64);
            }
        }
    }
    h
}

fn mutual_information(table: &ContingencyTable, rows: &[u64], cols: &[u64], n: f64) -> f64 {
    let mut mi = 0.0;
    for (row, &a) in table.iter_rows().zip(rows) {
        for (&v, &b) in row.iter().zip(cols) {
            if v > 0 {
                let v = v as f64;
                mi += (v / n) * libm::log(v * n / (a as f64 * b as f64));
            }
        }
    }
    mi.max(0.0)
}

/// Exact expected mutual information over the hypergeometric distribution
/// of each cell given its row and column marginals.
pub fn expected_mutual_information(rows: &[u64], cols: &[u64], lnf: &LogFactorials) -> f64 {
    let n: u64 = rows.iter().sum();
    assert!(lnf.max() >= n, "log-factorial table too short");
    let nf = n as f64;
    let ln_n = libm::log(nf);
    let lf = |k: u64| lnf.ln_factorial(k);
    let mut emi = 0.0;
    for &a in rows.iter().filter(|&&a| a > 0) {
        let ln_a = libm::log(a as f64);
        for &b in cols.iter().filter(|&&b| b > 0) {
            let ln_b = libm::log(b as f64);
            let fixed = lf(a) + lf(b) + lf(n - a) + lf(n - b) - lf(n);
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            for nij in lo..=hi {
                let ln_prob =
                    fixed - lf(nij) - lf(a - nij) - lf(b - nij) - lf(n + nij - a - b);
                let x = nij as f64;
                let info = ln_n + libm::log(x) - ln_a - ln_b;
                emi += (x / nf) * info * libm::exp(ln_prob);
            }
        }
    }
    emi
}

pub fn entropy_stats(table: &ContingencyTable) -> Result<EntropyStats, MetricError> {
    let (rows, cols) = marginals(table);
    let total: u64 = rows.iter().sum();
    if total == 0 {
        return Err(MetricError::ZeroTotal);
    }
    let n = total as f64;
    let lnf = LogFactorials::new(total);
    Ok(EntropyStats {
        h_truth: marginal_entropy(&rows, n),
        h_pred: marginal_entropy(&cols, n),
        h_truth_given_pred: h_truth_given_pred(table, &cols, n),
        h_pred_given_truth: h_pred_given_truth(table, &rows, n),
        mi: mutual_information(table, &rows, &cols, n),
        emi: expected_mutual_information(&rows, &cols, &lnf),
    })
}

/// Mutual information adjusted for chance, normalized by the arithmetic mean
/// of the two marginal entropies.
pub fn adjusted_mutual_information(table: &ContingencyTable) -> Result<f64, MetricError> {
    let total = table.total();
    adjusted_mutual_information_with(table, &LogFactorials::new(total))
}

/// As [`adjusted_mutual_information`], reusing a precomputed log-factorial
/// table that covers the table total.
pub fn adjusted_mutual_information_with(
    table: &ContingencyTable,
    lnf: &LogFactorials,
) -> Result<f64, MetricError> {
    let (rows, cols) = marginals(table);
    let total: u64 = rows.iter().sum();
    if total < 2 {
        return Err(MetricError::TooFewSamples(total));
    }
    let classes = rows.iter().filter(|&&v| v > 0).count();
    let clusters = cols.iter().filter(|&&v| v > 0).count();
    if classes == 1 && clusters == 1 {
        return Ok(1.0);
    }
    let n = total as f64;
    let mi = mutual_information(table, &rows, &cols, n);
    let emi = expected_mutual_information(&rows, &cols, lnf);
    let normalizer = 0.5 * (marginal_entropy(&rows, n) + marginal_entropy(&cols, n));
    let mut denom = normalizer - emi;
    denom = if denom < 0.0 {
        denom.min(-f64::EPSILON)
    } else {
        denom.max(f64::EPSILON)
    };
    Ok((mi - emi) / denom)
}

#[inline]
fn one_minus_ratio(conditional: f64, marginal: f64) -> f64 {
    if marginal == 0.0 {
        1.0
    } else {
        (1.0 - conditional / marginal).clamp(0.0, 1.0)
    }
}

/// Weighted harmonic mean of homogeneity and completeness.
#[inline]
pub fn v_from(homogeneity: f64, completeness: f64, beta: f64) -> f64 {
    let num = (1.0 + beta) * homogeneity * completeness;
    if num == 0.0 {
        0.0
    } else {
        num / (beta * homogeneity + completeness)
    }
}

/// Each cluster holds members of a single class: `1 - H(truth|pred)/H(truth)`.
pub fn homogeneity(table: &ContingencyTable) -> Result<f64, MetricError> {
    let (rows, cols) = marginals(table);
    let total: u64 = rows.iter().sum();
    if total == 0 {
        return Err(MetricError::ZeroTotal);
    }
    let n = total as f64;
    Ok(one_minus_ratio(
        h_truth_given_pred(table, &cols, n),
        marginal_entropy(&rows, n),
    ))
}

/// Each class falls in a single cluster: `1 - H(pred|truth)/H(pred)`.
pub fn completeness(table: &ContingencyTable) -> Result<f64, MetricError> {
    let (rows, cols) = marginals(table);
    let total: u64 = rows.iter().sum();
    if total == 0 {
        return Err(MetricError::ZeroTotal);
    }
    let n = total as f64;
    Ok(one_minus_ratio(
        h_pred_given_truth(table, &rows, n),
        marginal_entropy(&cols, n),
    ))
}

/// `(homogeneity, completeness, V)`; `beta > 1` weights completeness more,
/// `beta < 1` homogeneity.
pub fn homogeneity_completeness_v(
    table: &ContingencyTable,
    beta: f64,
) -> Result<(f64, f64, f64), MetricError> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(MetricError::NonPositiveBeta);
    }
    let (rows, cols) = marginals(table);
    let total: u64 = rows.iter().sum();
    if total == 0 {
        return Err(MetricError::ZeroTotal);
    }
    let n = total as f64;
    let h = one_minus_ratio(h_truth_given_pred(table, &cols, n), marginal_entropy(&rows, n));
    let c = one_minus_ratio(h_pred_given_truth(table, &rows, n), marginal_entropy(&cols, n));
    Ok((h, c, v_from(h, c, beta)))
}

pub fn v_measure(table: &ContingencyTable, beta: f64) -> Result<f64, MetricError> {
    homogeneity_completeness_v(table, beta).map(|(_, _, v)| v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::LN_2;

    fn t(rows: &[&[u64]]) -> ContingencyTable {
        ContingencyTable::from_rows(rows).unwrap()
    }

    fn fig1() -> ContingencyTable {
        t(&[
            &[151, 88, 72, 260],
            &[302, 330, 0, 158],
            &[161, 0, 313, 81],
            &[490, 0, 101, 14],
        ])
    }

    #[test]
    fn pair_counts_examples() {
        let p = pair_counts(&t(&[&[1, 1], &[1, 1]])).unwrap();
        assert_eq!(
            (p.same_same, p.same_diff, p.diff_same, p.diff_diff, p.n_pairs),
            (0, 2, 2, 2, 6)
        );
        let p = pair_counts(&t(&[&[2, 0], &[0, 2]])).unwrap();
        assert_eq!((p.same_same, p.same_diff, p.diff_same, p.diff_diff), (2, 0, 0, 4));
        assert_eq!(pair_counts(&fig1()).unwrap().n_pairs, 3_176_460);
        assert_eq!(
            pair_counts(&t(&[&[1, 0]])),
            Err(MetricError::TooFewSamples(1))
        );
    }

    #[test]
    fn ars_examples() {
        assert_eq!(adjusted_rand_score(&t(&[&[3, 0], &[0, 4]])).unwrap(), 1.0);
        let worst = t(&[&[631, 0], &[630, 0], &[630, 0], &[630, 0]]);
        assert_eq!(adjusted_rand_score(&worst).unwrap(), 0.0);
        // both partitions trivial: denominator vanishes
        assert_eq!(adjusted_rand_score(&t(&[&[5]])).unwrap(), 1.0);
    }

    #[test]
    fn fms_examples() {
        assert_eq!(fowlkes_mallows(&t(&[&[3, 0], &[0, 4]])).unwrap(), 1.0);
        assert_eq!(fowlkes_mallows(&t(&[&[1, 1], &[1, 1]])).unwrap(), 0.0);
        // all singletons: no co-clustered pairs anywhere
        assert_eq!(fowlkes_mallows(&t(&[&[1, 0], &[0, 1]])).unwrap(), 0.0);
    }

    #[test]
    fn entropy_examples() {
        let e = entropy_stats(&t(&[&[2, 0], &[0, 2]])).unwrap();
        for v in [e.h_truth, e.h_pred, e.mi] {
            assert!((v - LN_2).abs() < 1e-15);
        }
        let e = entropy_stats(&t(&[&[4]])).unwrap();
        assert_eq!((e.h_truth, e.h_pred, e.mi, e.emi), (0.0, 0.0, 0.0, 0.0));
        let e = entropy_stats(&t(&[&[1, 1], &[1, 1]])).unwrap();
        assert!(e.mi.abs() < 1e-15);
        assert_eq!(
            entropy_stats(&ContingencyTable::zeros(2, 2).unwrap()),
            Err(MetricError::ZeroTotal)
        );
    }

    #[test]
    fn emi_small_case_by_enumeration() {
        // marginals (1,1) x (1,1), n = 2: the two equally likely tables are
        // the identity and the swap, each with MI = ln 2, so EMI = ln 2.
        let lnf = LogFactorials::new(2);
        let emi = expected_mutual_information(&[1, 1], &[1, 1], &lnf);
        assert!((emi - LN_2).abs() < 1e-15);
    }

    #[test]
    fn log_factorials_match_products() {
        let lnf = LogFactorials::new(20);
        let mut f = 1.0f64;
        for k in 1..=20u64 {
            f *= k as f64;
            assert!((lnf.ln_factorial(k) - libm::log(f)).abs() < 1e-12);
        }
        let big = LogFactorials::new(2521);
        assert!((big.ln_factorial(2521) - libm::lgamma(2522.0)).abs() < 1e-9);
    }

    #[test]
    fn ami_examples() {
        assert!((adjusted_mutual_information(&t(&[&[3, 0], &[0, 4]])).unwrap() - 1.0).abs() < 1e-12);
        let worst = t(&[&[631, 0, 0], &[630, 0, 0], &[630, 0, 0], &[630, 0, 0]]);
        assert!(adjusted_mutual_information(&worst).unwrap().abs() <= 1e-10);
        assert_eq!(adjusted_mutual_information(&t(&[&[6], &[0]])).unwrap(), 1.0);
    }

    #[test]
    fn hcv_examples() {
        let worst = t(&[&[631, 0], &[630, 0], &[630, 0], &[630, 0]]);
        assert_eq!(homogeneity_completeness_v(&worst, 1.0).unwrap(), (0.0, 1.0, 0.0));
        let (h, c, v) = homogeneity_completeness_v(&t(&[&[0, 3], &[4, 0]]), 1.0).unwrap();
        assert_eq!((h, c, v), (1.0, 1.0, 1.0));
        assert_eq!(
            homogeneity_completeness_v(&worst, 0.0),
            Err(MetricError::NonPositiveBeta)
        );
        assert_eq!(
            homogeneity_completeness_v(&worst, f64::NAN),
            Err(MetricError::NonPositiveBeta)
        );
        let (h, c, _) = homogeneity_completeness_v(&fig1(), 1.0).unwrap();
        assert_eq!(homogeneity(&fig1()).unwrap(), h);
        assert_eq!(completeness(&fig1()).unwrap(), c);
    }

    #[test]
    fn beta_weights_completeness() {
        let (h, c, _) = homogeneity_completeness_v(&fig1(), 1.0).unwrap();
        let v2 = v_measure(&fig1(), 2.0).unwrap();
        assert!((v2 - 3.0 * h * c / (2.0 * h + c)).abs() < 1e-15);
    }
}
