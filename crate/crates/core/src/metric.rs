//! The eight metrics compared by the harness, behind one enum.

use core::fmt;
use core::str::FromStr;

use crate::ap::{self, ZeroRowPolicy};
use crate::refmetrics;
use crate::table::{ContingencyTable, TableError};

/// Errors from metric evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum MetricError {
    #[error("table total is zero")]
    ZeroTotal,
    #[error("associativity needs at least 2 truth classes, got {0}")]
    TooFewRows(usize),
    #[error("peakiness needs at least 2 clusters, got {0}")]
    TooFewColumns(usize),
    #[error("peakiness needs a row of length at least 2, got {0}")]
    RowTooShort(usize),
    #[error("every row is zero")]
    AllRowsZero,
    #[error("pair-counting metrics need at least 2 samples, got {0}")]
    TooFewSamples(u64),
    #[error("beta must be positive and finite")]
    NonPositiveBeta,
}

impl From<TableError> for MetricError {
    fn from(_: TableError) -> Self {
        MetricError::ZeroTotal
    }
}

/// Metric identifiers, in report column order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Ap,
    Ami,
    Ars,
    Fms,
    Completeness,
    Homogeneity,
    VMeasure,
    F1,
}

impl Metric {
    pub const ALL: [Metric; 8] = [
        Metric::Ap,
        Metric::Ami,
        Metric::Ars,
        Metric::Fms,
        Metric::Completeness,
        Metric::Homogeneity,
        Metric::VMeasure,
        Metric::F1,
    ];

    /// Short lowercase identifier used in file names and CLI flags.
    pub fn key(self) -> &'static str {
        match self {
            Metric::Ap => "ap",
            Metric::Ami => "ami",
            Metric::Ars => "ars",
            Metric::Fms => "fms",
            Metric::Completeness => "completeness",
            Metric::Homogeneity => "homogeneity",
            Metric::VMeasure => "v",
            Metric::F1 => "f1",
        }
    }

    /// Display label.
    pub fn label(self) -> &'static str {
        match self {
            Metric::Ap => "AP",
            Metric::Ami => "AMI",
            Metric::Ars => "ARS",
            Metric::Fms => "FMS",
            Metric::Completeness => "Completeness",
            Metric::Homogeneity => "Homogeneity",
            Metric::VMeasure => "V-Measure",
            Metric::F1 => "F1",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Nominal score range, used for default histogram bounds.
    pub fn range(self) -> (f64, f64) {
        match self {
            Metric::Ars => (-0.5, 1.0),
            _ => (0.0, 1.0),
        }
    }

    /// Evaluates the metric with default options (zero rows excluded, beta 1).
    #[inline]
    pub fn evaluate(self, table: &ContingencyTable) -> Result<f64, MetricError> {
        match self {
            Metric::Ap => ap::ap_value(table, ZeroRowPolicy::Exclude),
            Metric::Ami => refmetrics::adjusted_mutual_information(table),
            Metric::Ars => refmetrics::adjusted_rand_score(table),
            Metric::Fms => refmetrics::fowlkes_mallows(table),
            Metric::Completeness => refmetrics::completeness(table),
            Metric::Homogeneity => refmetrics::homogeneity(table),
            Metric::VMeasure => refmetrics::v_measure(table, 1.0),
            Metric::F1 => ap::f1_value(table),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown metric name")]
pub struct UnknownMetric;

impl FromStr for Metric {
    type Err = UnknownMetric;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Ok(match lower.as_str() {
            "ap" => Metric::Ap,
            "ami" => Metric::Ami,
            "ars" | "ari" => Metric::Ars,
            "fms" | "fm" => Metric::Fms,
            "completeness" | "c" => Metric::Completeness,
            "homogeneity" | "h" => Metric::Homogeneity,
            "v" | "v-measure" | "vmeasure" => Metric::VMeasure,
            "f1" => Metric::F1,
            _ => return Err(UnknownMetric),
        })
    }
}

/// All eight metric values for one table. A `None` marks a metric whose
/// preconditions the table does not meet.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScoreSet {
    pub values: [Option<f64>; 8],
}

impl ScoreSet {
    pub fn evaluate(table: &ContingencyTable) -> Self {
        let mut values = [None; 8];
        for m in Metric::ALL {
            values[m.index()] = m.evaluate(table).ok();
        }
        Self { values }
    }

    pub fn get(&self, metric: Metric) -> Option<f64> {
        self.values[metric.index()]
    }
}
