//! Plain CSV matrix format: one table row per line, comma-separated
//! non-negative integers. LF or CRLF accepted on input, LF written. Several
//! tables in one file are separated by blank lines.

use std::fmt::Write as _;

use apmetric::ContingencyTable;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CsvError {
    #[error("no table rows found")]
    Empty,
    #[error("line {line}: {found} fields, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}, column {col}: `{token}` is not an integer")]
    NonIntegerToken {
        line: usize,
        col: usize,
        token: String,
    },
    #[error("line {line}, column {col}: negative entry {value}")]
    NegativeEntry { line: usize, col: usize, value: i64 },
}

/// Parses one table. Lines and columns in errors are 1-based.
pub fn parse_csv(text: &str) -> Result<ContingencyTable, CsvError> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(k, l)| (k + 1, l)).collect();
    // trailing blank lines are tolerated, interior ones are not
    let end = lines
        .iter()
        .rposition(|(_, l)| !l.trim().is_empty())
        .map_or(0, |k| k + 1);
    parse_block(&lines[..end])
}

fn parse_block(lines: &[(usize, &str)]) -> Result<ContingencyTable, CsvError> {
    let mut counts = Vec::new();
    let mut width = None;
    for &(line, text) in lines {
        let before = counts.len();
        for (k, token) in text.split(',').enumerate() {
            let token = token.trim();
            let value: i64 = token.parse().map_err(|_| CsvError::NonIntegerToken {
                line,
                col: k + 1,
                token: token.to_string(),
            })?;
            if value < 0 {
                return Err(CsvError::NegativeEntry {
                    line,
                    col: k + 1,
                    value,
                });
            }
            counts.push(value as u64);
        }
        let found = counts.len() - before;
        match width {
            None => width = Some(found),
            Some(expected) if expected != found => {
                return Err(CsvError::RaggedRows {
                    line,
                    expected,
                    found,
                })
            }
            Some(_) => {}
        }
    }
    let cols = width.ok_or(CsvError::Empty)?;
    ContingencyTable::new(lines.len(), cols, counts).map_err(|_| CsvError::Empty)
}

pub fn serialize_csv(table: &ContingencyTable) -> String {
    let mut out = String::new();
    for row in table.iter_rows() {
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Parses blank-line separated tables.
pub fn parse_many(text: &str) -> Result<Vec<ContingencyTable>, CsvError> {
    let mut tables = Vec::new();
    let mut block: Vec<(usize, &str)> = Vec::new();
    for (k, l) in text.lines().enumerate() {
        if l.trim().is_empty() {
            if !block.is_empty() {
                tables.push(parse_block(&block)?);
                block.clear();
            }
        } else {
            block.push((k + 1, l));
        }
    }
    if !block.is_empty() {
        tables.push(parse_block(&block)?);
    }
    if tables.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(tables)
}

pub fn serialize_many<'a>(tables: impl IntoIterator<Item = &'a ContingencyTable>) -> String {
    let mut out = String::new();
    for (k, t) in tables.into_iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        out.push_str(&serialize_csv(t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fig1() {
        let t = parse_csv("151,88,72,260\n302,330,0,158\n161,0,313,81\n490,0,101,14").unwrap();
        assert_eq!((t.rows(), t.cols(), t.total()), (4, 4, 2521));
        assert_eq!(t.row(3), [490, 0, 101, 14]);
    }

    #[test]
    fn single_cell_and_crlf() {
        assert_eq!(parse_csv("5").unwrap(), ContingencyTable::from_rows(&[[5u64]]).unwrap());
        assert_eq!(
            parse_csv("1,2\r\n3,4\r\n\n").unwrap(),
            ContingencyTable::from_rows(&[[1u64, 2], [3, 4]]).unwrap()
        );
    }

    #[test]
    fn errors_name_the_position() {
        assert_eq!(
            parse_csv("1,2\n3"),
            Err(CsvError::RaggedRows {
                line: 2,
                expected: 2,
                found: 1
            })
        );
        assert_eq!(
            parse_csv("1,2\n3,x"),
            Err(CsvError::NonIntegerToken {
                line: 2,
                col: 2,
                token: "x".into()
            })
        );
        assert_eq!(
            parse_csv("1,-2"),
            Err(CsvError::NegativeEntry {
                line: 1,
                col: 2,
                value: -2
            })
        );
        assert_eq!(parse_csv(""), Err(CsvError::Empty));
        assert!(matches!(parse_csv("1,2\n\n3,4"), Err(CsvError::NonIntegerToken { line: 2, .. })));
    }

    #[test]
    fn serializes_with_lf() {
        let t = ContingencyTable::from_rows(&[[1u64, 20], [300, 4]]).unwrap();
        assert_eq!(serialize_csv(&t), "1,20\n300,4\n");
    }

    #[test]
    fn multi_table_files() {
        let a = ContingencyTable::from_rows(&[[1u64, 2], [3, 4]]).unwrap();
        let b = ContingencyTable::from_rows(&[[9u64]]).unwrap();
        let text = serialize_many([&a, &b]);
        assert_eq!(text, "1,2\n3,4\n\n9\n");
        assert_eq!(parse_many(&text).unwrap(), vec![a, b]);
        assert_eq!(parse_many("\n\n"), Err(CsvError::Empty));
    }
}
