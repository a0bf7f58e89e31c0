//! Pearson correlation and fixed-width histograms.

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum StatsError {
    #[error("sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 observations, got {0}")]
    TooFewObservations(usize),
    #[error("a sequence has zero variance")]
    ZeroVariance,
    #[error("histogram needs at least one bin and low < high")]
    InvalidBins,
}

/// Sample Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 2 {
        return Err(StatsError::TooFewObservations(n));
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let r = sxy / (libm::sqrt(sxx) * libm::sqrt(syy));
    Ok(r.clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` edges; bin `k` covers `[edges[k], edges[k+1])`, the last
    /// bin is closed on the right.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bins(&self) -> impl Iterator<Item = (f64, f64, u64)> + '_ {
        self.edges
            .windows(2)
            .zip(&self.counts)
            .map(|(w, &c)| (w[0], w[1], c))
    }

    /// Index of the most populated bin (first on ties).
    pub fn mode_bin(&self) -> usize {
        let mut best = 0;
        for (k, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = k;
            }
        }
        best
    }
}

/// Counts `values` into `bins` equal-width bins over `[low, high]`. Values
/// outside the range land in the nearest end bin; NaNs are skipped.
pub fn histogram(values: &[f64], bins: usize, low: f64, high: f64) -> Result<Histogram, StatsError> {
    if bins == 0 || low >= high || !low.is_finite() || !high.is_finite() {
        return Err(StatsError::InvalidBins);
    }
    let width = (high - low) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|k| if k == bins { high } else { low + width * k as f64 })
        .collect();
    let mut counts = vec![0u64; bins];
    for &v in values.iter().filter(|v| !v.is_nan()) {
        let k = if v <= low {
            0
        } else if v >= high {
            bins - 1
        } else {
            // correct for rounding in the division against the stored edges
            let mut k = (((v - low) / width) as usize).min(bins - 1);
            while k > 0 && v < edges[k] {
                k -= 1;
            }
            while k + 1 < bins && v >= edges[k + 1] {
                k += 1;
            }
            k
        };
        counts[k] += 1;
    }
    Ok(Histogram { edges, counts })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pearson_examples() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        assert!((pearson(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        assert!((pearson(&x, &neg).unwrap() + 1.0).abs() < 1e-15);
        // sxy = 6, sxx = 10, syy = 6  =>  r = 6 / sqrt(60)
        let r = pearson(&x, &[2.0, 4.0, 5.0, 4.0, 5.0]).unwrap();
        assert!((r - 6.0 / libm::sqrt(60.0)).abs() < 1e-15);
        assert!((r - 0.775).abs() < 5e-4);
    }

    #[test]
    fn pearson_errors() {
        assert_eq!(pearson(&[1.0, 2.0], &[1.0]), Err(StatsError::LengthMismatch(2, 1)));
        assert_eq!(pearson(&[1.0, 1.0], &[1.0, 2.0]), Err(StatsError::ZeroVariance));
        assert_eq!(pearson(&[1.0], &[1.0]), Err(StatsError::TooFewObservations(1)));
    }

    #[test]
    fn histogram_edges() {
        let h = histogram(&[0.0, 0.5, 1.0], 2, 0.0, 1.0).unwrap();
        assert_eq!(h.counts, [1, 2]);
        assert_eq!(h.edges, [0.0, 0.5, 1.0]);
        let e = histogram(&[], 4, 0.0, 1.0).unwrap();
        assert_eq!(e.counts, [0; 4]);
        let c = histogram(&[-3.0, 7.0, f64::NAN], 3, 0.0, 1.0).unwrap();
        assert_eq!(c.counts, [1, 0, 1]);
        assert_eq!(histogram(&[], 0, 0.0, 1.0), Err(StatsError::InvalidBins));
        assert_eq!(histogram(&[], 3, 1.0, 1.0), Err(StatsError::InvalidBins));
    }

    #[test]
    fn histogram_respects_stored_edges() {
        let h = histogram(&[0.12, 0.33, 0.5, 0.71, 0.96], 20, 0.0, 1.0).unwrap();
        for ((lo, hi, c), v) in h.bins().filter(|b| b.2 > 0).zip([0.12, 0.33, 0.5, 0.71, 0.96]) {
            assert_eq!(c, 1);
            assert!(lo <= v && v < hi, "{v} not in [{lo}, {hi})");
        }
    }
}
