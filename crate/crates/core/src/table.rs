//! File-backed sequences: one decimal per line, or CSV rows of `d` columns.

use std::path::Path;

use crate::error::{Error, Result};
use crate::numeric::Num;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FileFormat {
    ScalarLines,
    VectorCsv,
}

impl FileFormat {
    /// CSV when the first non-blank line holds a comma.
    pub fn detect(text: &str) -> FileFormat {
        match text.lines().find(|l| !l.trim().is_empty()) {
            Some(line) if line.contains(',') => FileFormat::VectorCsv,
            _ => FileFormat::ScalarLines,
        }
    }
}

#[derive(Debug, PartialEq)]
pub struct SequenceTable {
    rows: Vec<Vec<Num>>,
    dim: usize,
    source: String,
}

impl SequenceTable {
    pub fn from_rows(rows: Vec<Vec<Num>>, source: impl Into<String>) -> Result<Self> {
        let dim = match rows.first() {
            Some(r) if !r.is_empty() => r.len(),
            _ => return Err(Error::invalid("a sequence table needs at least one nonempty row")),
        };
        if let Some(i) = rows.iter().position(|r| r.len() != dim) {
            return Err(Error::Parse {
                line: i + 1,
                msg: format!("expected {dim} columns, found {}", rows[i].len()),
            });
        }
        Ok(SequenceTable {
            rows,
            dim,
            source: source.into(),
        })
    }

    pub fn parse_str(text: &str, format: FileFormat, source: impl Into<String>) -> Result<Self> {
        let rows = match format {
            FileFormat::ScalarLines => parse_scalar_lines(text)?,
            FileFormat::VectorCsv => parse_vector_csv(text)?,
        };
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 1,
                msg: "file holds no values".into(),
            });
        }
        SequenceTable::from_rows(rows, source)
    }

    pub fn read(path: &Path, format: FileFormat) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        SequenceTable::parse_str(&text, format, path.display().to_string())
    }

    pub fn len(&self) -> u64 {
        self.rows.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Row for 1-based index `k`.
    pub fn row(&self, k: u64) -> Result<&[Num]> {
        if k == 0 || k > self.len() {
            return Err(Error::OutOfRange { k, len: self.len() });
        }
        Ok(&self.rows[(k - 1) as usize])
    }

    pub fn rows(&self) -> &[Vec<Num>] {
        &self.rows
    }
}

fn parse_scalar_lines(text: &str) -> Result<Vec<Vec<Num>>> {
    let lines: Vec<&str> = text.lines().collect();
    let last = lines
        .iter()
        .rposition(|l| !l.trim().is_empty())
        .map_or(0, |i| i + 1);
    lines[..last]
        .iter()
        .enumerate()
        .map(|(i, line)| {
            let token = line.trim();
            if token.is_empty() {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: "blank line".into(),
                });
            }
            token.parse::<Num>().map(|v| vec![v]).map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("non-numeric token '{token}'"),
            })
        })
        .collect()
}

fn parse_vector_csv(text: &str) -> Result<Vec<Vec<Num>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<Num>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(rows.len() + 1, |p| p.line() as usize);
        if let Some(first) = rows.first() {
            if record.len() != first.len() {
                return Err(Error::Parse {
                    line,
                    msg: format!("ragged row: expected {} columns, found {}", first.len(), record.len()),
                });
            }
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<Num>().map_err(|_| Error::Parse {
                    line,
                    msg: format!("non-numeric token '{field}'"),
                })
            })
            .collect::<Result<Vec<Num>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_lines() {
        let t = SequenceTable::parse_str("1\n0\n1\n", FileFormat::ScalarLines, "mem").unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.row(2).unwrap(), &[Num::int(0)]);
        assert!(matches!(t.row(4), Err(Error::OutOfRange { k: 4, len: 3 })));
    }

    #[test]
    fn bad_token_reports_line() {
        let err = SequenceTable::parse_str("1\nx\n", FileFormat::ScalarLines, "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }

    #[test]
    fn interior_blank_line_rejected() {
        let err = SequenceTable::parse_str("1\n\n2\n", FileFormat::ScalarLines, "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn csv_rows() {
        let text = "1,2\n3,4\n";
        assert_eq!(FileFormat::detect(text), FileFormat::VectorCsv);
        let t = SequenceTable::parse_str(text, FileFormat::VectorCsv, "mem").unwrap();
        assert_eq!(t.dim(), 2);
        assert_eq!(t.row(2).unwrap(), &[Num::int(3), Num::int(4)]);
    }

    #[test]
    fn ragged_csv_rejected() {
        let err = SequenceTable::parse_str("1,2\n3\n", FileFormat::VectorCsv, "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = SequenceTable::parse_str("1,2\n3,y\n", FileFormat::VectorCsv, "mem").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    }
}
