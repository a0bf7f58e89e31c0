//! Clustering evaluation metrics computed directly from contingency tables.
//!
//! The central type is [`ContingencyTable`]: rows are ground-truth classes,
//! columns are cluster indices, and each cell counts the samples of a class
//! that landed in a cluster. On top of it this crate provides
//!
//! - the associativity, peakiness and AP metrics plus the F1 contingency
//!   metric ([`ap`]),
//! - pair-counting and information-theoretic comparison metrics: Rand,
//!   adjusted Rand, Fowlkes-Mallows, adjusted mutual information,
//!   homogeneity, completeness and V-measure ([`refmetrics`]),
//! - a seeded random table generator based on sorted dividers ([`tablegen`]),
//! - Pearson correlation and histogram helpers ([`stats`]),
//! - scenario definitions and extreme reference tables ([`scenario`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, timing and the
//! command-line front end live in the `apmetric-tools` companion crate.
//!
//! ```
//! use apmetric::{ap, ContingencyTable};
//!
//! let table = ContingencyTable::from_rows(&[
//!     [151u64, 88, 72, 260],
//!     [302, 330, 0, 158],
//!     [161, 0, 313, 81],
//!     [490, 0, 101, 14],
//! ])
//! .unwrap();
//! let score = ap::ap_score(&table, ap::ZeroRowPolicy::Exclude).unwrap();
//! assert_eq!(score.associativity, 1.0);
//! assert!((score.ap - 0.617).abs() < 5e-4);
//! ```
#![no_std]

extern crate alloc;

pub mod ap;
pub mod metric;
pub mod refmetrics;
pub mod scenario;
pub mod stats;
pub mod table;
pub mod tablegen;

pub use metric::{Metric, MetricError, ScoreSet};
pub use table::{ContingencyTable, LabelPair, TableError};
