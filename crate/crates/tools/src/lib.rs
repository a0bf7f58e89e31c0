//! File formats, scenario harness, timing and the `apscore` command line
//! for the `apmetric` core crate.

pub mod cli;
pub mod csvfmt;
pub mod harness;
pub mod report;
