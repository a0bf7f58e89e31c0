//! Contingency-table data model and the table <-> label-vector duality.

use alloc::vec;
use alloc::vec::Vec;

/// Errors raised while building or converting a contingency table.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TableError {
    /// A cell held a negative count.
    #[error("negative entry {value} at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: i64 },
    /// The table had no rows or no columns.
    #[error("table has no rows or no columns")]
    EmptyTable,
    /// A row did not have the same length as the first row.
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    /// The counts buffer did not match `rows * cols`.
    #[error("expected {expected} counts for the given shape, got {found}")]
    ShapeMismatch { expected: usize, found: usize },
    /// Every cell was zero where a populated table is required.
    #[error("table total is zero")]
    ZeroTotal,
    /// Truth and predicted label vectors differ in length.
    #[error("label length mismatch: truth={truth}, predicted={predicted}")]
    LengthMismatch { truth: usize, predicted: usize },
    /// No labels were given.
    #[error("label vectors are empty")]
    EmptyInput,
}

/// An R x C matrix of sample counts. Rows are truth classes, columns are
/// clusters. Stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    counts: Vec<u64>,
}

/// Result of [`validate`]: a well-formed table plus whether it is empty of
/// samples. Metric operations reject zero-total tables; construction does not.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validated {
    pub table: ContingencyTable,
    pub zero_total: bool,
}

/// Checks a signed grid and converts it to a table.
pub fn validate<R: AsRef<[i64]>>(grid: &[R]) -> Result<Validated, TableError> {
    let first = grid.first().ok_or(TableError::EmptyTable)?.as_ref().len();
    if first == 0 {
        return Err(TableError::EmptyTable);
    }
    let mut counts = Vec::with_capacity(grid.len() * first);
    for (i, row) in grid.iter().enumerate() {
        let row = row.as_ref();
        if row.len() != first {
            return Err(TableError::RaggedRows {
                row: i,
                expected: first,
                found: row.len(),
            });
        }
        for (j, &v) in row.iter().enumerate() {
            if v < 0 {
                return Err(TableError::NegativeEntry {
                    row: i,
                    col: j,
                    value: v,
                });
            }
            counts.push(v as u64);
        }
    }
    let table = ContingencyTable {
        rows: grid.len(),
        cols: first,
        counts,
    };
    let zero_total = table.total() == 0;
    Ok(Validated { table, zero_total })
}

impl ContingencyTable {
    /// Builds a table from a row-major buffer.
    pub fn new(rows: usize, cols: usize, counts: Vec<u64>) -> Result<Self, TableError> {
        if rows == 0 || cols == 0 {
            return Err(TableError::EmptyTable);
        }
        if counts.len() != rows * cols {
            return Err(TableError::ShapeMismatch {
                expected: rows * cols,
                found: counts.len(),
            });
        }
        Ok(Self { rows, cols, counts })
    }

    /// Builds a table from rows of unsigned counts.
    pub fn from_rows<R: AsRef<[u64]>>(rows: &[R]) -> Result<Self, TableError> {
        let cols = rows.first().ok_or(TableError::EmptyTable)?.as_ref().len();
        let mut counts = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(TableError::RaggedRows {
                    row: i,
                    expected: cols,
                    found: row.len(),
                });
            }
            counts.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, counts)
    }

    /// An all-zero table of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Result<Self, TableError> {
        Self::new(rows, cols, vec![0; rows * cols])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.cols + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u64) {
        self.counts[row * self.cols + col] = value;
    }

    /// Row-major cell counts.
    #[inline]
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    #[inline]
    pub fn row(&self, row: usize) -> &[u64] {
        &self.counts[row * self.cols..(row + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[u64]> + '_ {
        self.counts.chunks_exact(self.cols)
    }

    pub fn column(&self, col: usize) -> impl Iterator<Item = u64> + '_ {
        self.counts.iter().skip(col).step_by(self.cols).copied()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of samples in each truth class.
    pub fn row_sums(&self) -> Vec<u64> {
        self.iter_rows().map(|r| r.iter().sum()).collect()
    }

    /// Number of samples in each cluster.
    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0u64; self.cols];
        for row in self.iter_rows() {
            for (s, &v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    pub fn transpose(&self) -> Self {
        let mut counts = Vec::with_capacity(self.counts.len());
        for j in 0..self.cols {
            counts.extend(self.column(j));
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            counts,
        }
    }

    /// Returns a copy with every count multiplied by `k`.
    pub fn scaled(&self, k: u64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            counts: self.counts.iter().map(|&v| v * k).collect(),
        }
    }

    /// Reorders rows and columns: row `i` of the result is row `row_order[i]`
    /// of `self`, likewise for columns.
    pub fn permuted(&self, row_order: &[usize], col_order: &[usize]) -> Self {
        assert_eq!(row_order.len(), self.rows);
        assert_eq!(col_order.len(), self.cols);
        let mut counts = Vec::with_capacity(self.counts.len());
        for &i in row_order {
            for &j in col_order {
                counts.push(self.get(i, j));
            }
        }
        Self {
            rows: self.rows,
            cols: self.cols,
            counts,
        }
    }

    /// Returns `Err(ZeroTotal)` for a table without samples.
    pub fn require_samples(&self) -> Result<u64, TableError> {
        match self.total() {
            0 => Err(TableError::ZeroTotal),
            n => Ok(n),
        }
    }
}

/// Paired truth and predicted labels for the same samples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LabelPair {
    pub truth: Vec<usize>,
    pub predicted: Vec<usize>,
}

impl LabelPair {
    pub fn len(&self) -> usize {
        self.truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.truth.is_empty()
    }
}

/// Expands a table into one (truth, predicted) label per sample, in
/// row-major cell order.
pub fn to_labels(table: &ContingencyTable) -> Result<LabelPair, TableError> {
    let n = table.require_samples()? as usize;
    let mut truth = Vec::with_capacity(n);
    let mut predicted = Vec::with_capacity(n);
    for i in 0..table.rows() {
        for j in 0..table.cols() {
            let c = table.get(i, j) as usize;
            truth.extend(core::iter::repeat_n(i, c));
            predicted.extend(core::iter::repeat_n(j, c));
        }
    }
    Ok(LabelPair { truth, predicted })
}

/// Tabulates label pairs. The shape is `(max truth + 1, max predicted + 1)`.
pub fn from_labels(labels: &LabelPair) -> Result<ContingencyTable, TableError> {
    if labels.truth.len() != labels.predicted.len() {
        return Err(TableError::LengthMismatch {
            truth: labels.truth.len(),
            predicted: labels.predicted.len(),
        });
    }
    let rows = labels.truth.iter().max().ok_or(TableError::EmptyInput)? + 1;
    let cols = labels.predicted.iter().max().ok_or(TableError::EmptyInput)? + 1;
    let mut table = ContingencyTable::zeros(rows, cols)?;
    for (&t, &p) in labels.truth.iter().zip(&labels.predicted) {
        table.counts[t * cols + p] += 1;
    }
    Ok(table)
}
