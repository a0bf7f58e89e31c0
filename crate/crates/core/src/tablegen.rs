//! Random contingency tables with a fixed total, via sorted dividers.
//!
//! `numvals - 1` dividers are drawn with replacement from `0..total` and
//! sorted; the gaps between consecutive dividers (with 0 and `total` as the
//! outer fences) form a non-negative vector summing to `total`. In the
//! high-performance mode the value 0 is drawn far more often than any other
//! divider, which piles zeros into the vector and concentrates the mass in a
//! few large cells. The vector is shuffled in that mode and reshaped
//! row-major.

use alloc::vec::Vec;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::table::ContingencyTable;

/// The PRNG used for all generation: ChaCha with 8 rounds.
pub type TableRng = ChaCha8Rng;

pub const DEFAULT_ZERO_WEIGHT: f64 = 1000.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generation spec: {0}")]
    InvalidSpec(&'static str),
}

/// Low mode draws dividers uniformly; high mode favours the divider 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Low,
    High,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub rows: usize,
    pub cols: usize,
    pub total: u64,
    pub mode: Mode,
    /// Relative weight of the divider 0 in high mode. Ignored in low mode.
    pub zero_weight: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(rows: usize, cols: usize, total: u64, mode: Mode, seed: u64) -> Self {
        Self {
            rows,
            cols,
            total,
            mode,
            zero_weight: DEFAULT_ZERO_WEIGHT,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(GenError::InvalidSpec("table shape must be at least 1x1"));
        }
        if self.total == 0 {
            return Err(GenError::InvalidSpec("total must be positive"));
        }
        if !(self.zero_weight >= 1.0 && self.zero_weight.is_finite()) {
            return Err(GenError::InvalidSpec("zero weight must be a finite value >= 1"));
        }
        Ok(())
    }

    /// Effective weight of the divider 0.
    pub fn divider_zero_weight(&self) -> f64 {
        match self.mode {
            Mode::Low => 1.0,
            Mode::High => self.zero_weight,
        }
    }

    /// Independent stream for table `index` of a batch generated from this
    /// spec's seed.
    pub fn stream(&self, index: u64) -> TableRng {
        table_stream(self.seed, index)
    }
}

/// Deterministic per-table stream: the master seed picks the key, the table
/// index picks the ChaCha stream.
pub fn table_stream(master_seed: u64, index: u64) -> TableRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Draws one divider from `0..total`, with the value 0 carrying relative
/// weight `zero_weight` and every other value weight 1.
#[inline]
pub fn draw_divider<R: Rng + ?Sized>(total: u64, zero_weight: f64, rng: &mut R) -> u64 {
    if total == 1 {
        return 0;
    }
    if zero_weight == 1.0 {
        return rng.random_range(0..total);
    }
    let p_zero = zero_weight / (zero_weight + (total - 1) as f64);
    if rng.random_bool(p_zero) {
        0
    } else {
        rng.random_range(1..total)
    }
}

/// Sorted dividers for a vector of `numvals` entries.
pub fn draw_dividers<R: Rng + ?Sized>(
    total: u64,
    numvals: usize,
    zero_weight: f64,
    rng: &mut R,
) -> Vec<u64> {
    let mut dividers: Vec<u64> = (1..numvals)
        .map(|_| draw_divider(total, zero_weight, rng))
        .collect();
    dividers.sort_unstable();
    dividers
}

/// Non-negative vector of length `numvals` summing to `total`.
pub fn random_sum_vector<R: Rng + ?Sized>(
    total: u64,
    numvals: usize,
    zero_weight: f64,
    rng: &mut R,
) -> Result<Vec<u64>, GenError> {
    if total == 0 {
        return Err(GenError::InvalidSpec("total must be positive"));
    }
    if numvals == 0 {
        return Err(GenError::InvalidSpec("vector length must be positive"));
    }
    if !(zero_weight >= 1.0 && zero_weight.is_finite()) {
        return Err(GenError::InvalidSpec("zero weight must be a finite value >= 1"));
    }
    let dividers = draw_dividers(total, numvals, zero_weight, rng);
    let mut out = Vec::with_capacity(numvals);
    let mut prev = 0;
    for &d in dividers.iter().chain(core::iter::once(&total)) {
        out.push(d - prev);
        prev = d;
    }
    Ok(out)
}

/// One random table drawn from `rng`.
pub fn generate_table<R: Rng + ?Sized>(
    spec: &GenSpec,
    rng: &mut R,
) -> Result<ContingencyTable, GenError> {
    spec.validate()?;
    let mut cells = random_sum_vector(
        spec.total,
        spec.rows * spec.cols,
        spec.divider_zero_weight(),
        rng,
    )?;
    if spec.mode == Mode::High {
        cells.shuffle(rng);
    }
    ContingencyTable::new(spec.rows, spec.cols, cells)
        .map_err(|_| GenError::InvalidSpec("table shape must be at least 1x1"))
}

/// Table `index` of the batch defined by `spec` and its seed.
pub fn generate_indexed(spec: &GenSpec, index: u64) -> Result<ContingencyTable, GenError> {
    generate_table(spec, &mut spec.stream(index))
}
