//! Canonical sparse matrix representations: COO staging, CSR ground truth,
//! row length statistics, file ingestion, and synthetic generation.
//!
//! CSR is the reference representation: every storage format is built from it
//! and every kernel is checked against it. All types are immutable after
//! construction and safe to share across threads.

mod generate;
mod market;
mod snapshot;

pub use generate::{generate, Distribution, GeneratorSpec};
pub use market::{read_matrix_market, write_matrix_market};
pub use snapshot::{read_snapshot, write_snapshot, SNAPSHOT_MAGIC};

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Coordinate-format staging matrix: an unordered list of (row, col, value)
/// triplets, as produced by file ingestion.
#[derive(Debug, Clone, PartialEq)]
pub struct CooMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl CooMatrix {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        CooMatrix {
            n_rows,
            n_cols,
            entries: Vec::new(),
        }
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Sort entries by (row, col) and reject duplicate coordinates.
    pub fn canonicalize(&mut self) -> Result<()> {
        self.entries.sort_by_key(|e| (e.0, e.1));
        for w in self.entries.windows(2) {
            if w[0].0 == w[1].0 && w[0].1 == w[1].1 {
                return Err(Error::DuplicateEntry {
                    row: w[0].0,
                    col: w[0].1,
                });
            }
        }
        Ok(())
    }
}

/// Compressed sparse row matrix, the ground truth for all conversions.
///
/// Invariants, enforced by [`CsrMatrix::new`]: `row_ptr` is nondecreasing
/// with `row_ptr[0] = 0` and `row_ptr[n_rows] = nnz`; within each row the
/// column indices are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_ptr: Vec<usize>,
    pub col_idx: Vec<usize>,
    pub values: Vec<f64>,
}

impl CsrMatrix {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidMatrix(
                "matrix dimensions must be positive".into(),
            ));
        }
        if row_ptr.len() != n_rows + 1 {
            return Err(Error::InvalidMatrix(format!(
                "row_ptr has length {}, expected {}",
                row_ptr.len(),
                n_rows + 1
            )));
        }
        if row_ptr[0] != 0 {
            return Err(Error::InvalidMatrix("row_ptr[0] must be 0".into()));
        }
        if col_idx.len() != values.len() {
            return Err(Error::InvalidMatrix(format!(
                "col_idx has length {} but values has length {}",
                col_idx.len(),
                values.len()
            )));
        }
        if *row_ptr.last().unwrap() != values.len() {
            return Err(Error::InvalidMatrix(format!(
                "row_ptr ends at {} but there are {} entries",
                row_ptr.last().unwrap(),
                values.len()
            )));
        }
        for i in 0..n_rows {
            if row_ptr[i] > row_ptr[i + 1] {
                return Err(Error::InvalidMatrix(format!(
                    "row_ptr decreases at row {i}"
                )));
            }
            let cols = &col_idx[row_ptr[i]..row_ptr[i + 1]];
            for w in cols.windows(2) {
                if w[0] >= w[1] {
                    return Err(Error::InvalidMatrix(format!(
                        "column indices not strictly increasing in row {i}"
                    )));
                }
            }
            if let Some(&c) = cols.last() {
                if c >= n_cols {
                    return Err(Error::InvalidMatrix(format!(
                        "column index {c} out of bounds in row {i}"
                    )));
                }
            }
        }
        Ok(CsrMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn row_len(&self, i: usize) -> usize {
        self.row_ptr[i + 1] - self.row_ptr[i]
    }

    pub fn row_cols(&self, i: usize) -> &[usize] {
        &self.col_idx[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn row_values(&self, i: usize) -> &[f64] {
        &self.values[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    pub fn row_lengths(&self) -> Vec<usize> {
        (0..self.n_rows).map(|i| self.row_len(i)).collect()
    }

    pub fn max_row_len(&self) -> usize {
        (0..self.n_rows).map(|i| self.row_len(i)).max().unwrap_or(0)
    }

    /// Index of the first row with no entries, if any. Storage format
    /// builders reject such matrices.
    pub fn first_empty_row(&self) -> Option<usize> {
        (0..self.n_rows).find(|&i| self.row_len(i) == 0)
    }

    /// Re-expand to coordinate form (entries in row-major order).
    pub fn to_coo(&self) -> CooMatrix {
        let mut entries = Vec::with_capacity(self.nnz());
        for i in 0..self.n_rows {
            for (c, v) in self.row_cols(i).iter().zip(self.row_values(i)) {
                entries.push((i, *c, *v));
            }
        }
        CooMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            entries,
        }
    }
}

/// Convert a coordinate matrix to CSR. The input is canonicalized (sorted by
/// row, then column); duplicate coordinates are an error.
pub fn coo_to_csr(m: &CooMatrix) -> Result<CsrMatrix> {
    let mut coo = m.clone();
    coo.canonicalize()?;
    for &(r, c, _) in &coo.entries {
        if r >= coo.n_rows || c >= coo.n_cols {
            return Err(Error::IndexOutOfBounds {
                row: r,
                col: c,
                n_rows: coo.n_rows,
                n_cols: coo.n_cols,
                line: 0,
            });
        }
    }
    let mut row_ptr = vec![0usize; coo.n_rows + 1];
    for &(r, _, _) in &coo.entries {
        row_ptr[r + 1] += 1;
    }
    for i in 0..coo.n_rows {
        row_ptr[i + 1] += row_ptr[i];
    }
    let col_idx = coo.entries.iter().map(|e| e.1).collect();
    let values = coo.entries.iter().map(|e| e.2).collect();
    CsrMatrix::new(coo.n_rows, coo.n_cols, row_ptr, col_idx, values)
}

/// Row length distribution with bin size 1.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowLengthHistogram {
    /// row length -> number of rows with that length
    pub bins: BTreeMap<usize, usize>,
    pub min_len: usize,
    pub max_len: usize,
    pub mean_len: f64,
}

impl RowLengthHistogram {
    pub fn n_rows(&self) -> usize {
        self.bins.values().sum()
    }
}

/// Exact row length histogram of a CSR matrix; `mean_len = nnz / n_rows`.
pub fn histogram(m: &CsrMatrix) -> RowLengthHistogram {
    let mut bins = BTreeMap::new();
    for i in 0..m.n_rows {
        *bins.entry(m.row_len(i)).or_insert(0) += 1;
    }
    let min_len = bins.keys().next().copied().unwrap_or(0);
    let max_len = bins.keys().next_back().copied().unwrap_or(0);
    RowLengthHistogram {
        bins,
        min_len,
        max_len,
        mean_len: m.nnz() as f64 / m.n_rows as f64,
    }
}
