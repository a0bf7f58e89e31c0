//! The six evaluation scenarios and their table sources.

use alloc::vec::Vec;

use crate::table::ContingencyTable;
use crate::tablegen::{self, GenError, GenSpec, Mode, DEFAULT_ZERO_WEIGHT};

/// Sample count of every scenario table.
pub const DEFAULT_TOTAL: u64 = 2521;
/// Tables per randomized scenario.
pub const DEFAULT_TABLES: usize = 500;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot build an ideal {rows}x{cols} table: need at least as many clusters as classes")]
    ShapeUnsatisfiable { rows: usize, cols: usize },
    #[error("unknown scenario id {0} (expected 1-6)")]
    UnknownScenario(u32),
    #[error(transparent)]
    Gen(#[from] GenError),
}

/// Where a scenario's tables come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TableKind {
    /// One-to-one matching of classes to clusters.
    Ideal,
    /// Every sample in cluster 0.
    Worst,
    /// Random tables from the divider generator.
    Random(Mode),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// 1-6 for the built-in scenarios, `None` for custom runs.
    pub id: Option<u32>,
    pub rows: usize,
    pub cols: usize,
    pub kind: TableKind,
    pub n_tables: usize,
    pub total: u64,
    pub zero_weight: f64,
    pub master_seed: u64,
}

impl ScenarioConfig {
    /// Built-in scenario: 1 ideal 4x4, 2 worst 4x4, 3 low 4x4, 4 high 4x4,
    /// 5 high 4x6, 6 high 4x2.
    pub fn builtin(id: u32, master_seed: u64) -> Result<Self, ScenarioError> {
        let (cols, kind) = match id {
            1 => (4, TableKind::Ideal),
            2 => (4, TableKind::Worst),
            3 => (4, TableKind::Random(Mode::Low)),
            4 => (4, TableKind::Random(Mode::High)),
            5 => (6, TableKind::Random(Mode::High)),
            6 => (2, TableKind::Random(Mode::High)),
            other => return Err(ScenarioError::UnknownScenario(other)),
        };
        let n_tables = match kind {
            TableKind::Random(_) => DEFAULT_TABLES,
            _ => 1,
        };
        Ok(Self {
            id: Some(id),
            rows: 4,
            cols,
            kind,
            n_tables,
            total: DEFAULT_TOTAL,
            zero_weight: DEFAULT_ZERO_WEIGHT,
            master_seed,
        })
    }

    pub fn custom(rows: usize, cols: usize, kind: TableKind, n_tables: usize, total: u64, master_seed: u64) -> Self {
        Self {
            id: None,
            rows,
            cols,
            kind,
            n_tables,
            total,
            zero_weight: DEFAULT_ZERO_WEIGHT,
            master_seed,
        }
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            TableKind::Ideal => "ideal",
            TableKind::Worst => "worst",
            TableKind::Random(Mode::Low) => "low",
            TableKind::Random(Mode::High) => "high",
        }
    }

    pub fn gen_spec(&self) -> Option<GenSpec> {
        match self.kind {
            TableKind::Random(mode) => Some(GenSpec {
                rows: self.rows,
                cols: self.cols,
                total: self.total,
                mode,
                zero_weight: self.zero_weight,
                seed: self.master_seed,
            }),
            _ => None,
        }
    }

    /// Table `index` of this scenario. Extreme scenarios repeat their single
    /// table.
    pub fn table(&self, index: usize) -> Result<ContingencyTable, ScenarioError> {
        match self.gen_spec() {
            Some(spec) => Ok(tablegen::generate_indexed(&spec, index as u64)?),
            None => extreme_table(self.kind, self.rows, self.cols, self.total),
        }
    }

    pub fn tables(&self) -> Result<Vec<ContingencyTable>, ScenarioError> {
        (0..self.n_tables).map(|k| self.table(k)).collect()
    }
}

/// `total` split over `parts` as evenly as possible, remainder to the front.
fn even_split(total: u64, parts: usize) -> impl Iterator<Item = u64> {
    let base = total / parts as u64;
    let extra = (total % parts as u64) as usize;
    (0..parts).map(move |k| base + u64::from(k < extra))
}

/// Ideal or worst-case reference table of the given shape.
pub fn extreme_table(
    kind: TableKind,
    rows: usize,
    cols: usize,
    total: u64,
) -> Result<ContingencyTable, ScenarioError> {
    let mut table = ContingencyTable::zeros(rows, cols)
        .map_err(|_| ScenarioError::ShapeUnsatisfiable { rows, cols })?;
    match kind {
        TableKind::Ideal => {
            if cols < rows {
                return Err(ScenarioError::ShapeUnsatisfiable { rows, cols });
            }
            for (i, v) in even_split(total, rows).enumerate() {
                table.set(i, i, v);
            }
        }
        TableKind::Worst => {
            for (i, v) in even_split(total, rows).enumerate() {
                table.set(i, 0, v);
            }
        }
        TableKind::Random(_) => {
            return Err(ScenarioError::Gen(GenError::InvalidSpec(
                "random tables come from the generator",
            )))
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_tables() {
        let ideal = extreme_table(TableKind::Ideal, 4, 4, 2521).unwrap();
        let diag: Vec<u64> = (0..4).map(|i| ideal.get(i, i)).collect();
        assert_eq!(diag, [631, 630, 630, 630]);
        assert_eq!(ideal.total(), 2521);

        let worst = extreme_table(TableKind::Worst, 4, 4, 2521).unwrap();
        assert_eq!(worst.column(0).collect::<Vec<_>>(), [631, 630, 630, 630]);
        assert_eq!(worst.total(), 2521);

        assert_eq!(
            extreme_table(TableKind::Ideal, 4, 2, 2521),
            Err(ScenarioError::ShapeUnsatisfiable { rows: 4, cols: 2 })
        );
    }

    #[test]
    fn builtin_bindings() {
        let shapes: Vec<(usize, usize, usize)> = (1..=6)
            .map(|id| {
                let c = ScenarioConfig::builtin(id, 0).unwrap();
                (c.rows, c.cols, c.n_tables)
            })
            .collect();
        assert_eq!(shapes, [(4, 4, 1), (4, 4, 1), (4, 4, 500), (4, 4, 500), (4, 6, 500), (4, 2, 500)]);
        assert_eq!(ScenarioConfig::builtin(3, 0).unwrap().kind, TableKind::Random(Mode::Low));
        assert_eq!(ScenarioConfig::builtin(9, 0), Err(ScenarioError::UnknownScenario(9)));
    }
}
