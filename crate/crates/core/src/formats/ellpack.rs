//! ELLPACK and ELLPACK-R builders.

use crate::error::Result;
use crate::matrix::CsrMatrix;

use super::{reject_empty_rows, round_up};

/// Rectangular column-major storage: every row padded to the width of the
/// longest row, the row count padded to a multiple of the warp size.
///
/// Element (i, j) of the rectangle lives at `values[j * n_rows_padded + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllpackMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub n_rows_padded: usize,
    pub warp_size: usize,
    /// Maximum non-zeros per row of the source matrix.
    pub width: usize,
    pub values: Vec<f64>,
    pub col_idx: Vec<usize>,
    /// Non-zeros of the source matrix (stored entries minus padding).
    pub nnz: usize,
}

impl EllpackMatrix {
    pub fn stored_entries(&self) -> usize {
        self.n_rows_padded * self.width
    }

    /// Value at rectangle position (row, jag).
    #[inline]
    pub fn slot(&self, row: usize, jag: usize) -> (f64, usize) {
        let k = jag * self.n_rows_padded + row;
        (self.values[k], self.col_idx[k])
    }
}

/// ELLPACK plus a per-row non-zero count so kernels skip the padding.
#[derive(Debug, Clone, PartialEq)]
pub struct EllpackRMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub n_rows_padded: usize,
    pub warp_size: usize,
    pub width: usize,
    pub values: Vec<f64>,
    pub col_idx: Vec<usize>,
    /// Non-zeros per row, length `n_rows_padded` (0 for pad rows).
    pub rowmax: Vec<usize>,
    pub nnz: usize,
}

impl EllpackRMatrix {
    pub fn stored_entries(&self) -> usize {
        self.n_rows_padded * self.width
    }

    #[inline]
    pub fn slot(&self, row: usize, jag: usize) -> (f64, usize) {
        let k = jag * self.n_rows_padded + row;
        (self.values[k], self.col_idx[k])
    }
}

fn build_rectangle(m: &CsrMatrix, warp_size: usize) -> (usize, usize, Vec<f64>, Vec<usize>) {
    let n_rows_padded = round_up(m.n_rows, warp_size.max(1));
    let width = m.max_row_len();
    let stored = n_rows_padded * width;
    let mut values = vec![0.0; stored];
    let mut col_idx = vec![0usize; stored];
    for i in 0..m.n_rows {
        for (j, (&c, &v)) in m.row_cols(i).iter().zip(m.row_values(i)).enumerate() {
            values[j * n_rows_padded + i] = v;
            col_idx[j * n_rows_padded + i] = c;
        }
    }
    (n_rows_padded, width, values, col_idx)
}

/// Build ELLPACK storage. Rows are compressed to the left and the rectangle
/// is stored column by column. Errors on empty rows.
pub fn build_ellpack(m: &CsrMatrix, warp_size: usize) -> Result<EllpackMatrix> {
    reject_empty_rows(m)?;
    let (n_rows_padded, width, values, col_idx) = build_rectangle(m, warp_size);
    Ok(EllpackMatrix {
        n_rows: m.n_rows,
        n_cols: m.n_cols,
        n_rows_padded,
        warp_size: warp_size.max(1),
        width,
        values,
        col_idx,
        nnz: m.nnz(),
    })
}

/// Build ELLPACK-R storage (ELLPACK plus `rowmax`).
pub fn build_ellpack_r(m: &CsrMatrix, warp_size: usize) -> Result<EllpackRMatrix> {
    reject_empty_rows(m)?;
    let (n_rows_padded, width, values, col_idx) = build_rectangle(m, warp_size);
    let mut rowmax = vec![0usize; n_rows_padded];
    for (i, r) in rowmax.iter_mut().enumerate().take(m.n_rows) {
        *r = m.row_len(i);
    }
    Ok(EllpackRMatrix {
        n_rows: m.n_rows,
        n_cols: m.n_cols,
        n_rows_padded,
        warp_size: warp_size.max(1),
        width,
        values,
        col_idx,
        rowmax,
        nnz: m.nnz(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::matrix::{generate, Distribution, GeneratorSpec};

    /// CSR with the given row lengths; column j gets value row*100 + j.
    pub(crate) fn csr_with_lengths(lengths: &[usize]) -> CsrMatrix {
        let n = lengths.len();
        let n_cols = *lengths.iter().max().unwrap();
        let mut row_ptr = vec![0usize];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        for (i, &len) in lengths.iter().enumerate() {
            for j in 0..len {
                col_idx.push(j);
                values.push((i * 100 + j) as f64);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix::new(n, n_cols, row_ptr, col_idx, values).unwrap()
    }

    #[test]
    fn constant_rows_no_overhead() {
        let m = generate(&GeneratorSpec {
            n_rows: 8,
            distribution: Distribution::Constant { row_len: 3 },
            seed: 2,
        })
        .unwrap();
        let e = build_ellpack(&m, 4).unwrap();
        assert_eq!(e.width, 3);
        assert_eq!(e.n_rows_padded, 8);
        assert_eq!(e.stored_entries(), 24);
        assert_eq!(e.stored_entries(), e.nnz);
    }

    #[test]
    fn adversarial_stores_full_matrix() {
        let n = 32;
        let m = generate(&GeneratorSpec {
            n_rows: n,
            distribution: Distribution::Adversarial,
            seed: 0,
        })
        .unwrap();
        let e = build_ellpack(&m, 1).unwrap();
        assert_eq!(e.stored_entries(), n * n);
    }

    #[test]
    fn hand_computed_padding() {
        let m = csr_with_lengths(&[2, 3, 1, 3, 2, 1]);
        let e = build_ellpack(&m, 2).unwrap();
        assert_eq!(e.width, 3);
        assert_eq!(e.n_rows_padded, 6);
        assert_eq!(e.stored_entries(), 18);
    }

    #[test]
    fn rowmax_matches_lengths() {
        let m = csr_with_lengths(&[2, 3, 1]);
        let e = build_ellpack_r(&m, 2).unwrap();
        assert_eq!(e.rowmax, vec![2, 3, 1, 0]);
        assert_eq!(e.n_rows_padded, 4);
    }

    #[test]
    fn rowmax_sums_to_nnz() {
        let m = generate(&GeneratorSpec {
            n_rows: 37,
            distribution: Distribution::Uniform { lo: 1, hi: 9 },
            seed: 21,
        })
        .unwrap();
        let e = build_ellpack_r(&m, 32).unwrap();
        assert_eq!(e.rowmax.iter().sum::<usize>(), m.nnz());
    }

    #[test]
    fn constant_rowmax_all_k() {
        let m = generate(&GeneratorSpec {
            n_rows: 12,
            distribution: Distribution::Constant { row_len: 4 },
            seed: 1,
        })
        .unwrap();
        let e = build_ellpack_r(&m, 4).unwrap();
        assert!(e.rowmax.iter().all(|&r| r == 4));
    }

    #[test]
    fn empty_row_rejected() {
        let m = CsrMatrix::new(2, 2, vec![0, 0, 1], vec![0], vec![1.0]).unwrap();
        match build_ellpack(&m, 4) {
            Err(Error::EmptyRow { row: 0 }) => {}
            other => panic!("expected empty-row error, got {other:?}"),
        }
    }

    #[test]
    fn entries_preserved() {
        let m = generate(&GeneratorSpec {
            n_rows: 23,
            distribution: Distribution::Uniform { lo: 1, hi: 7 },
            seed: 8,
        })
        .unwrap();
        let e = build_ellpack_r(&m, 8).unwrap();
        for i in 0..m.n_rows {
            let mut got: Vec<(usize, f64)> = (0..e.rowmax[i]).map(|j| {
                let (v, c) = e.slot(i, j);
                (c, v)
            }).collect();
            got.sort_by_key(|a| a.0);
            let want: Vec<(usize, f64)> = m
                .row_cols(i)
                .iter()
                .copied()
                .zip(m.row_values(i).iter().copied())
                .collect();
            assert_eq!(got, want);
        }
    }
}
