//! Dense payoff matrices with a fixed arithmetic mode, plus the plain-text
//! file format: first line "n_rows n_cols", then one whitespace-separated
//! row per line. Entries parse as rationals "p/q" or decimals. File indices
//! and documentation are 1-based; everything in memory is 0-based.

use std::io::{BufRead, Write};

use crate::scalar::{Mode, Scalar, ScalarParseError};

#[derive(Clone, Debug)]
pub struct MatrixInstance {
    n_rows: usize,
    n_cols: usize,
    mode: Mode,
    entries: Vec<Scalar>,
}

#[derive(Debug, thiserror::Error)]
pub enum MatrixParseError {
    #[error("empty matrix file")]
    Empty,
    #[error("bad header line {0:?} (expected \"n_rows n_cols\")")]
    BadHeader(String),
    #[error("row {row}: expected {expected} entries, found {found}")]
    BadRowLength {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("expected {expected} rows, found {found}")]
    MissingRows { expected: usize, found: usize },
    #[error("row {row}, column {col}: {source}")]
    BadEntry {
        row: usize,
        col: usize,
        source: ScalarParseError,
    },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl MatrixInstance {
    /// Builds a matrix by evaluating `f` at every (row, col), row-major.
    pub fn from_fn(
        n_rows: usize,
        n_cols: usize,
        mode: Mode,
        mut f: impl FnMut(usize, usize) -> Scalar,
    ) -> Self {
        assert!(n_rows > 0 && n_cols > 0, "matrix dimensions must be positive");
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                let s = f(i, j);
                assert!(s.mode() == mode, "entry mode mismatch at ({i},{j})");
                entries.push(s);
            }
        }
        MatrixInstance {
            n_rows,
            n_cols,
            mode,
            entries,
        }
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Self {
        assert!(!rows.is_empty(), "matrix needs at least one row");
        let n_cols = rows[0].len();
        let mode = rows[0][0].mode();
        let n_rows = rows.len();
        MatrixInstance::from_fn(n_rows, n_cols, mode, |i, j| {
            assert!(rows[i].len() == n_cols, "ragged rows");
            rows[i][j].clone()
        })
    }

    /// Integer literal matrix, handy in tests.
    pub fn from_ints(rows: &[&[i64]], mode: Mode) -> Self {
        MatrixInstance::from_fn(rows.len(), rows[0].len(), mode, |i, j| {
            Scalar::from_int(rows[i][j], mode)
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        assert!(i < self.n_rows && j < self.n_cols, "index out of bounds");
        &self.entries[i * self.n_cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Scalar) {
        assert!(i < self.n_rows && j < self.n_cols, "index out of bounds");
        assert!(value.mode() == self.mode, "entry mode mismatch");
        self.entries[i * self.n_cols + j] = value;
    }

    /// Submatrix with the given original row/column indices, in order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> MatrixInstance {
        MatrixInstance::from_fn(rows.len(), cols.len(), self.mode, |i, j| {
            self.get(rows[i], cols[j]).clone()
        })
    }

    pub fn transpose(&self) -> MatrixInstance {
        MatrixInstance::from_fn(self.n_cols, self.n_rows, self.mode, |i, j| {
            self.get(j, i).clone()
        })
    }

    pub fn negated(&self) -> MatrixInstance {
        MatrixInstance::from_fn(self.n_rows, self.n_cols, self.mode, |i, j| -self.get(i, j))
    }

    pub fn min_entry(&self) -> &Scalar {
        self.entries
            .iter()
            .min_by(|a, b| a.cmp_raw(b))
            .expect("nonempty matrix")
    }

    /// Entrywise equality in the matrix's own mode semantics.
    pub fn same_entries(&self, other: &MatrixInstance) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self.entries.iter().zip(&other.entries).all(|(a, b)| a == b)
    }

    pub fn read_from(reader: impl BufRead, mode: Mode) -> Result<Self, MatrixParseError> {
        let mut lines = reader.lines();
        let header = loop {
            match lines.next() {
                None => return Err(MatrixParseError::Empty),
                Some(line) => {
                    let line = line?;
                    if !line.trim().is_empty() {
                        break line;
                    }
                }
            }
        };
        let dims: Vec<&str> = header.split_whitespace().collect();
        let parse_dim = |s: &str| s.parse::<usize>().ok().filter(|d| *d > 0);
        let (n_rows, n_cols) = match dims.as_slice() {
            [r, c] => match (parse_dim(r), parse_dim(c)) {
                (Some(r), Some(c)) => (r, c),
                _ => return Err(MatrixParseError::BadHeader(header)),
            },
            _ => return Err(MatrixParseError::BadHeader(header)),
        };
        let mut entries = Vec::with_capacity(n_rows * n_cols);
        let mut row = 0usize;
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            if row >= n_rows {
                break;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != n_cols {
                return Err(MatrixParseError::BadRowLength {
                    row: row + 1,
                    expected: n_cols,
                    found: fields.len(),
                });
            }
            for (col, field) in fields.iter().enumerate() {
                let value =
                    Scalar::parse(field, mode).map_err(|source| MatrixParseError::BadEntry {
                        row: row + 1,
                        col: col + 1,
                        source,
                    })?;
                entries.push(value);
            }
            row += 1;
        }
        if row != n_rows {
            return Err(MatrixParseError::MissingRows {
                expected: n_rows,
                found: row,
            });
        }
        Ok(MatrixInstance {
            n_rows,
            n_cols,
            mode,
            entries,
        })
    }

    pub fn write_to(&self, mut writer: impl Write) -> std::io::Result<()> {
        writeln!(writer, "{} {}", self.n_rows, self.n_cols)?;
        for i in 0..self.n_rows {
            let row: Vec<String> = (0..self.n_cols)
                .map(|j| self.get(i, j).to_string())
                .collect();
            writeln!(writer, "{}", row.join(" "))?;
        }
        Ok(())
    }
}
