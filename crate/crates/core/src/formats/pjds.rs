//! Padded Jagged Diagonals Storage.
//!
//! Rows are sorted by descending non-zero count (stable, ties broken by
//! original row index), grouped into blocks of `b_r` consecutive rows, and
//! each block is padded to its own longest row. Because the blocks are
//! sorted, the rows taking part in jagged column j are always a prefix of
//! the permuted row order, so a per-column starting offset (`col_start`)
//! is enough to address the storage: the element of permuted row i in
//! column j lives at `values[col_start[j] + i]`.

use crate::error::Result;
use crate::matrix::CsrMatrix;

use super::{reject_empty_rows, round_up};

#[derive(Debug, Clone, PartialEq)]
pub struct PjdsMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    /// Row count padded to a multiple of `block_rows` with zero-length
    /// virtual rows before blocking.
    pub n_rows_padded: usize,
    pub block_rows: usize,
    /// Maximum non-zeros per row of the source matrix.
    pub width: usize,
    /// new (sorted) row index -> original row index, length `n_rows`.
    pub permutation: Vec<usize>,
    pub values: Vec<f64>,
    pub col_idx: Vec<usize>,
    /// Starting offset of each jagged column, length `width + 1`;
    /// `col_start[width]` equals the total stored entry count.
    pub col_start: Vec<usize>,
    /// Non-zeros per row in permuted order, length `n_rows_padded`
    /// (0 for virtual pad rows).
    pub rowmax: Vec<usize>,
    pub nnz: usize,
}

impl PjdsMatrix {
    pub fn stored_entries(&self) -> usize {
        *self.col_start.last().unwrap()
    }

    pub fn n_blocks(&self) -> usize {
        self.n_rows_padded / self.block_rows
    }

    /// Padded length of block `b` (its longest row).
    pub fn block_max(&self, b: usize) -> usize {
        let begin = b * self.block_rows;
        let end = begin + self.block_rows;
        self.rowmax[begin..end].iter().copied().max().unwrap_or(0)
    }
}

/// Build pJDS storage with blocks of `b_r` rows. Errors on empty rows.
pub fn build_pjds(m: &CsrMatrix, b_r: usize) -> Result<PjdsMatrix> {
    reject_empty_rows(m)?;
    let b_r = b_r.max(1);
    let n_rows_padded = round_up(m.n_rows, b_r);

    // stable sort: length descending, original index ascending
    let mut permutation: Vec<usize> = (0..m.n_rows).collect();
    permutation.sort_by(|&a, &b| m.row_len(b).cmp(&m.row_len(a)).then(a.cmp(&b)));

    let mut rowmax = vec![0usize; n_rows_padded];
    for (new, &old) in permutation.iter().enumerate() {
        rowmax[new] = m.row_len(old);
    }

    let width = if m.n_rows > 0 { rowmax[0] } else { 0 };
    let n_blocks = n_rows_padded / b_r;
    let block_max: Vec<usize> = (0..n_blocks)
        .map(|b| rowmax[b * b_r..(b + 1) * b_r].iter().copied().max().unwrap())
        .collect();

    // col_start[j+1] - col_start[j] = b_r * (number of blocks whose padded
    // width exceeds j); those blocks are a prefix because block_max is
    // nonincreasing.
    let mut col_start = Vec::with_capacity(width + 1);
    col_start.push(0usize);
    for j in 0..width {
        let active_blocks = block_max.iter().filter(|&&bm| bm > j).count();
        col_start.push(col_start[j] + b_r * active_blocks);
    }

    let stored = *col_start.last().unwrap();
    let mut values = vec![0.0; stored];
    let mut col_idx = vec![0usize; stored];
    for (new, &old) in permutation.iter().enumerate() {
        for (j, (&c, &v)) in m.row_cols(old).iter().zip(m.row_values(old)).enumerate() {
            let k = col_start[j] + new;
            values[k] = v;
            col_idx[k] = c;
        }
    }

    Ok(PjdsMatrix {
        n_rows: m.n_rows,
        n_cols: m.n_cols,
        n_rows_padded,
        block_rows: b_r,
        width,
        permutation,
        values,
        col_idx,
        col_start,
        rowmax,
        nnz: m.nnz(),
    })
}
