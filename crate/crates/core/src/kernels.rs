//! spMVM kernels for every storage format, sequential and chunk-parallel.
//!
//! Accumulation order is fixed as left-to-right over each row's stored
//! order in every kernel, so cross-format comparisons are tight and
//! repeated runs are bitwise identical. The ELLPACK kernel executes padded
//! slots (they contribute +0.0); ELLPACK-R and pJDS skip them via `rowmax`.

use std::collections::BTreeMap;
use std::ops::Range;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::formats::{EllpackMatrix, EllpackRMatrix, PjdsMatrix};
use crate::matrix::CsrMatrix;

/// Utilization counters for one kernel run.
///
/// `padded_fma` counts stored zeros actually processed (ELLPACK only);
/// `idle_lane_cycles` counts lanes waiting for the longest row of their
/// warp/block (ELLPACK-R and pJDS, where padding is skipped but the lane
/// stays reserved). Byte counters are worst-case accounting: one value
/// (8 bytes) and one index (4 bytes) per processed slot, one RHS load
/// (8 bytes) per processed slot, and a 16-byte write-allocate per output
/// row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpmvStats {
    pub useful_fma: u64,
    pub padded_fma: u64,
    pub idle_lane_cycles: u64,
    pub bytes_matrix: u64,
    pub bytes_rhs_worst: u64,
    pub bytes_lhs: u64,
}

impl SpmvStats {
    fn new(useful: u64, padded: u64, idle: u64, n_rows: u64) -> Self {
        let processed = useful + padded;
        SpmvStats {
            useful_fma: useful,
            padded_fma: padded,
            idle_lane_cycles: idle,
            bytes_matrix: processed * 12,
            bytes_rhs_worst: processed * 8,
            bytes_lhs: n_rows * 16,
        }
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// y = A x on CSR; per row the columns are accumulated in ascending order.
pub fn spmv_csr(m: &CsrMatrix, x: &[f64]) -> Result<Vec<f64>> {
    check_dim(m.n_cols, x.len())?;
    let mut y = vec![0.0; m.n_rows];
    csr_rows(m, x, 0..m.n_rows, &mut y);
    Ok(y)
}

fn csr_rows(m: &CsrMatrix, x: &[f64], rows: Range<usize>, out: &mut [f64]) {
    for (i, yi) in rows.clone().zip(out.iter_mut()) {
        let mut sum = 0.0;
        for (c, v) in m.row_cols(i).iter().zip(m.row_values(i)) {
            sum += v * x[*c];
        }
        *yi = sum;
    }
}

/// ELLPACK kernel: every stored slot of a real row is executed, including
/// the padding (value 0.0, column 0).
pub fn spmv_ellpack(m: &EllpackMatrix, x: &[f64]) -> Result<(Vec<f64>, SpmvStats)> {
    check_dim(m.n_cols, x.len())?;
    let mut y = vec![0.0; m.n_rows];
    ellpack_rows(m, x, 0..m.n_rows, &mut y);
    // padded slots cover intra-row padding and whole pad rows
    let stats = SpmvStats::new(
        m.nnz as u64,
        (m.stored_entries() - m.nnz) as u64,
        0,
        m.n_rows as u64,
    );
    Ok((y, stats))
}

fn ellpack_rows(m: &EllpackMatrix, x: &[f64], rows: Range<usize>, out: &mut [f64]) {
    for (i, yi) in rows.clone().zip(out.iter_mut()) {
        let mut sum = 0.0;
        for j in 0..m.width {
            let k = j * m.n_rows_padded + i;
            sum += m.values[k] * x[m.col_idx[k]];
        }
        *yi = sum;
    }
}

/// ELLPACK-R kernel: threads execute only the `rowmax[i]` stored non-zeros
/// of each row.
pub fn spmv_ellpack_r(m: &EllpackRMatrix, x: &[f64]) -> Result<(Vec<f64>, SpmvStats)> {
    check_dim(m.n_cols, x.len())?;
    let mut y = vec![0.0; m.n_rows];
    ellpack_r_rows(m, x, 0..m.n_rows, &mut y);
    let stats = SpmvStats::new(
        m.nnz as u64,
        0,
        idle_per_group(&m.rowmax, m.warp_size),
        m.n_rows as u64,
    );
    Ok((y, stats))
}

fn ellpack_r_rows(m: &EllpackRMatrix, x: &[f64], rows: Range<usize>, out: &mut [f64]) {
    for (i, yi) in rows.clone().zip(out.iter_mut()) {
        let mut sum = 0.0;
        for j in 0..m.rowmax[i] {
            let k = j * m.n_rows_padded + i;
            sum += m.values[k] * x[m.col_idx[k]];
        }
        *yi = sum;
    }
}

/// Lanes idle while the longest row of their group finishes:
/// sum over groups of `group_size` rows of (group max - row length).
fn idle_per_group(rowmax: &[usize], group_size: usize) -> u64 {
    rowmax
        .chunks(group_size)
        .map(|chunk| {
            let max = chunk.iter().copied().max().unwrap_or(0);
            chunk.iter().map(|&len| (max - len) as u64).sum::<u64>()
        })
        .sum()
}

/// pJDS kernel: the result is in permuted row order; the RHS is given in
/// the original basis (rows are permuted, columns are not).
pub fn spmv_pjds(m: &PjdsMatrix, x: &[f64]) -> Result<(Vec<f64>, SpmvStats)> {
    check_dim(m.n_cols, x.len())?;
    let mut y = vec![0.0; m.n_rows];
    pjds_rows(m, x, 0..m.n_rows, &mut y);
    // intra-block padding is stored but skipped: it shows up as idle lanes
    let stats = SpmvStats::new(
        m.nnz as u64,
        0,
        idle_per_group(&m.rowmax, m.block_rows),
        m.n_rows as u64,
    );
    Ok((y, stats))
}

fn pjds_rows(m: &PjdsMatrix, x: &[f64], rows: Range<usize>, out: &mut [f64]) {
    for (i, yi) in rows.clone().zip(out.iter_mut()) {
        let mut sum = 0.0;
        for j in 0..m.rowmax[i] {
            let col_offset = m.col_start[j];
            sum += m.values[col_offset + i] * x[m.col_idx[col_offset + i]];
        }
        *yi = sum;
    }
}

/// Split spMVM: columns inside `local_cols` read `x_local` (rebased), all
/// others read `x_nonlocal` through `remap` (global column -> buffer slot).
///
/// The result vector is written twice: a local pass stores the partial sums,
/// a nonlocal pass adds the remaining contributions.
pub fn spmv_split(
    m: &CsrMatrix,
    local_cols: Range<usize>,
    remap: &BTreeMap<usize, usize>,
    x_local: &[f64],
    x_nonlocal: &[f64],
) -> Result<Vec<f64>> {
    check_dim(local_cols.len(), x_local.len())?;
    let mut y = vec![0.0; m.n_rows];
    split_local_pass(m, local_cols.clone(), x_local, &mut y);
    split_nonlocal_pass(m, local_cols, remap, x_nonlocal, &mut y)?;
    Ok(y)
}

pub(crate) fn split_local_pass(
    m: &CsrMatrix,
    local_cols: Range<usize>,
    x_local: &[f64],
    y: &mut [f64],
) {
    for (i, yi) in y.iter_mut().enumerate().take(m.n_rows) {
        let mut sum = 0.0;
        for (c, v) in m.row_cols(i).iter().zip(m.row_values(i)) {
            if local_cols.contains(c) {
                sum += v * x_local[c - local_cols.start];
            }
        }
        *yi = sum;
    }
}

pub(crate) fn split_nonlocal_pass(
    m: &CsrMatrix,
    local_cols: Range<usize>,
    remap: &BTreeMap<usize, usize>,
    x_nonlocal: &[f64],
    y: &mut [f64],
) -> Result<()> {
    for (i, yi) in y.iter_mut().enumerate().take(m.n_rows) {
        let mut sum = 0.0;
        for (c, v) in m.row_cols(i).iter().zip(m.row_values(i)) {
            if !local_cols.contains(c) {
                let slot = remap.get(c).ok_or(Error::UnmappedColumn { col: *c })?;
                sum += v * x_nonlocal[*slot];
            }
        }
        *yi += sum;
    }
    Ok(())
}

// Split passes over the block storage formats used by the distributed
// runner. Stored order per row matches the source CSR, so the sums are
// bitwise identical to the CSR passes.

pub(crate) fn split_local_pass_ellpack_r(
    m: &EllpackRMatrix,
    local_cols: Range<usize>,
    x_local: &[f64],
    y: &mut [f64],
) {
    for (i, yi) in y.iter_mut().enumerate().take(m.n_rows) {
        let mut sum = 0.0;
        for j in 0..m.rowmax[i] {
            let k = j * m.n_rows_padded + i;
            let c = m.col_idx[k];
            if local_cols.contains(&c) {
                sum += m.values[k] * x_local[c - local_cols.start];
            }
        }
        *yi = sum;
    }
}

pub(crate) fn split_nonlocal_pass_ellpack_r(
    m: &EllpackRMatrix,
    local_cols: Range<usize>,
    remap: &BTreeMap<usize, usize>,
    x_nonlocal: &[f64],
    y: &mut [f64],
) -> Result<()> {
    for (i, yi) in y.iter_mut().enumerate().take(m.n_rows) {
        let mut sum = 0.0;
        for j in 0..m.rowmax[i] {
            let k = j * m.n_rows_padded + i;
            let c = m.col_idx[k];
            if !local_cols.contains(&c) {
                let slot = remap.get(&c).ok_or(Error::UnmappedColumn { col: c })?;
                sum += m.values[k] * x_nonlocal[*slot];
            }
        }
        *yi += sum;
    }
    Ok(())
}

/// pJDS rows are permuted; the passes scatter straight into the original
/// row order through `m.permutation`.
pub(crate) fn split_local_pass_pjds(
    m: &PjdsMatrix,
    local_cols: Range<usize>,
    x_local: &[f64],
    y: &mut [f64],
) {
    for i in 0..m.n_rows {
        let mut sum = 0.0;
        for j in 0..m.rowmax[i] {
            let k = m.col_start[j] + i;
            let c = m.col_idx[k];
            if local_cols.contains(&c) {
                sum += m.values[k] * x_local[c - local_cols.start];
            }
        }
        y[m.permutation[i]] = sum;
    }
}

pub(crate) fn split_nonlocal_pass_pjds(
    m: &PjdsMatrix,
    local_cols: Range<usize>,
    remap: &BTreeMap<usize, usize>,
    x_nonlocal: &[f64],
    y: &mut [f64],
) -> Result<()> {
    for i in 0..m.n_rows {
        let mut sum = 0.0;
        for j in 0..m.rowmax[i] {
            let k = m.col_start[j] + i;
            let c = m.col_idx[k];
            if !local_cols.contains(&c) {
                let slot = remap.get(&c).ok_or(Error::UnmappedColumn { col: c })?;
                sum += m.values[k] * x_nonlocal[*slot];
            }
        }
        y[m.permutation[i]] += sum;
    }
    Ok(())
}

/// Row-partitioned kernel: any format whose output rows can be computed
/// independently.
pub trait SpmvKernel: Sync {
    /// Number of output rows (for pJDS these are in permuted order).
    fn out_len(&self) -> usize;
    fn n_cols(&self) -> usize;
    fn compute_rows(&self, x: &[f64], rows: Range<usize>, out: &mut [f64]);
}

impl SpmvKernel for CsrMatrix {
    fn out_len(&self) -> usize {
        self.n_rows
    }
    fn n_cols(&self) -> usize {
        self.n_cols
    }
    fn compute_rows(&self, x: &[f64], rows: Range<usize>, out: &mut [f64]) {
        csr_rows(self, x, rows, out);
    }
}

impl SpmvKernel for EllpackMatrix {
    fn out_len(&self) -> usize {
        self.n_rows
    }
    fn n_cols(&self) -> usize {
        self.n_cols
    }
    fn compute_rows(&self, x: &[f64], rows: Range<usize>, out: &mut [f64]) {
        ellpack_rows(self, x, rows, out);
    }
}

impl SpmvKernel for EllpackRMatrix {
    fn out_len(&self) -> usize {
        self.n_rows
    }
    fn n_cols(&self) -> usize {
        self.n_cols
    }
    fn compute_rows(&self, x: &[f64], rows: Range<usize>, out: &mut [f64]) {
        ellpack_r_rows(self, x, rows, out);
    }
}

impl SpmvKernel for PjdsMatrix {
    fn out_len(&self) -> usize {
        self.n_rows
    }
    fn n_cols(&self) -> usize {
        self.n_cols
    }
    fn compute_rows(&self, x: &[f64], rows: Range<usize>, out: &mut [f64]) {
        pjds_rows(self, x, rows, out);
    }
}

/// Chunk-parallel spMVM: output rows are partitioned into `chunks`
/// contiguous ranges computed by one thread each. Per-row accumulation is
/// untouched, so the result is bitwise identical to the sequential kernel.
pub fn spmv_parallel<K: SpmvKernel>(m: &K, x: &[f64], chunks: usize) -> Result<Vec<f64>> {
    check_dim(m.n_cols(), x.len())?;
    let n = m.out_len();
    // chunks beyond n_rows would only add empty ranges
    let chunks = chunks.clamp(1, n.max(1));
    let mut y = vec![0.0; n];
    if chunks == 1 {
        m.compute_rows(x, 0..n, &mut y);
        return Ok(y);
    }
    let per = n.div_ceil(chunks);
    std::thread::scope(|scope| {
        let mut rest = y.as_mut_slice();
        let mut begin = 0;
        for _ in 0..chunks {
            let end = (begin + per).min(n);
            let (mine, tail) = rest.split_at_mut(end - begin);
            rest = tail;
            let range = begin..end;
            scope.spawn(move || m.compute_rows(x, range, mine));
            begin = end;
        }
    });
    Ok(y)
}

/// Order-independent 64-bit checksum over IEEE-754 bit patterns: the
/// wrapping sum of `to_bits()` of every element. Invariant under element
/// permutation, so permuted and unpermuted results of the same multiset
/// compare equal.
pub fn vector_checksum(v: &[f64]) -> u64 {
    v.iter().fold(0u64, |acc, x| acc.wrapping_add(x.to_bits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{build_ellpack, build_ellpack_r, build_pjds, permute_vector, PermuteDirection};
    use crate::matrix::{generate, Distribution, GeneratorSpec};

    fn identity(n: usize) -> CsrMatrix {
        CsrMatrix::new(
            n,
            n,
            (0..=n).collect(),
            (0..n).collect(),
            vec![1.0; n],
        )
        .unwrap()
    }

    fn dense_oracle(m: &CsrMatrix, x: &[f64]) -> Vec<f64> {
        let mut dense = vec![vec![0.0; m.n_cols]; m.n_rows];
        for (i, row) in dense.iter_mut().enumerate() {
            for (c, v) in m.row_cols(i).iter().zip(m.row_values(i)) {
                row[*c] = *v;
            }
        }
        dense
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn rel_inf_err(got: &[f64], want: &[f64]) -> f64 {
        let denom = want.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
        got.iter()
            .zip(want)
            .fold(0.0f64, |a, (g, w)| a.max((g - w).abs()))
            / denom
    }

    #[test]
    fn csr_identity_and_zero() {
        let id = identity(5);
        let x = vec![1.0, -2.0, 3.0, -4.0, 5.0];
        assert_eq!(spmv_csr(&id, &x).unwrap(), x);

        let zero = CsrMatrix::new(3, 3, vec![0, 0, 0, 0], vec![], vec![]).unwrap();
        assert_eq!(spmv_csr(&zero, &[1.0, 2.0, 3.0]).unwrap(), vec![0.0; 3]);
    }

    #[test]
    fn csr_row_sums_match_dense_oracle() {
        let m = generate(&GeneratorSpec {
            n_rows: 6,
            distribution: Distribution::Uniform { lo: 1, hi: 4 },
            seed: 42,
        })
        .unwrap();
        let ones = vec![1.0; 6];
        let y = spmv_csr(&m, &ones).unwrap();
        let want = dense_oracle(&m, &ones);
        assert!(rel_inf_err(&y, &want) <= 1e-13);
    }

    #[test]
    fn ellpack_r_identity_stats() {
        let id = identity(8);
        let e = build_ellpack_r(&id, 4).unwrap();
        let x: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let (y, stats) = spmv_ellpack_r(&e, &x).unwrap();
        assert_eq!(y, x);
        assert_eq!(stats.useful_fma, 8);
        assert_eq!(stats.padded_fma, 0);
        assert_eq!(stats.idle_lane_cycles, 0);
    }

    #[test]
    fn ellpack_r_adversarial_idle_recount() {
        let n = 16;
        let warp = 4;
        let m = generate(&GeneratorSpec {
            n_rows: n,
            distribution: Distribution::Adversarial,
            seed: 0,
        })
        .unwrap();
        let e = build_ellpack_r(&m, warp).unwrap();
        let x = vec![1.0; n];
        let (_, stats) = spmv_ellpack_r(&e, &x).unwrap();
        // recount per warp from rowmax
        let mut idle = 0u64;
        for w in e.rowmax.chunks(warp) {
            let max = *w.iter().max().unwrap();
            for &len in w {
                idle += (max - len) as u64;
            }
        }
        assert_eq!(stats.idle_lane_cycles, idle);
        // warp 0: rows [16,1,1,1] -> 45 idle; other warps constant length 1
        assert_eq!(idle, 45);
    }

    #[test]
    fn ellpack_padded_fma_counts() {
        let n = 16;
        let m = generate(&GeneratorSpec {
            n_rows: n,
            distribution: Distribution::Adversarial,
            seed: 0,
        })
        .unwrap();
        let e = build_ellpack(&m, 1).unwrap();
        let x = vec![1.0; n];
        let (y, stats) = spmv_ellpack(&e, &x).unwrap();
        assert_eq!(stats.padded_fma, (n * n - (2 * n - 1)) as u64);
        assert_eq!(stats.useful_fma + stats.padded_fma, e.stored_entries() as u64);
        let want = dense_oracle(&m, &x);
        assert!(rel_inf_err(&y, &want) <= 1e-13);
    }

    #[test]
    fn ellpack_identity_returns_rhs() {
        let id = identity(6);
        let e = build_ellpack(&id, 4).unwrap();
        let x: Vec<f64> = (0..6).map(|i| (i + 1) as f64 * 0.5).collect();
        let (y, stats) = spmv_ellpack(&e, &x).unwrap();
        assert_eq!(y, x);
        assert_eq!(stats.useful_fma, 6);
        // pad rows 6..8 count as padded work
        assert_eq!(stats.padded_fma, 2);
    }

    #[test]
    fn ellpack_constant_no_padding() {
        let m = generate(&GeneratorSpec {
            n_rows: 8,
            distribution: Distribution::Constant { row_len: 3 },
            seed: 7,
        })
        .unwrap();
        let e = build_ellpack(&m, 4).unwrap();
        let (_, stats) = spmv_ellpack(&e, &[1.0; 8]).unwrap();
        assert_eq!(stats.padded_fma, 0);
    }

    #[test]
    fn pjds_identity_round_trip() {
        let id = identity(10);
        let p = build_pjds(&id, 4).unwrap();
        let x: Vec<f64> = (0..10).map(|i| (i + 1) as f64).collect();
        let (yp, stats) = spmv_pjds(&p, &x).unwrap();
        let y = permute_vector(&yp, &p.permutation, PermuteDirection::Inverse).unwrap();
        assert_eq!(y, x);
        assert_eq!(stats.useful_fma, 10);
        assert_eq!(stats.padded_fma, 0);
    }

    #[test]
    fn pjds_matches_oracle_after_inverse_permutation() {
        let m = generate(&GeneratorSpec {
            n_rows: 64,
            distribution: Distribution::Clustered {
                peak_fraction: 0.6,
                peak_len: 12,
                tail_lo: 2,
            },
            seed: 31,
        })
        .unwrap();
        let p = build_pjds(&m, 4).unwrap();
        let x: Vec<f64> = (0..64).map(|i| (i as f64 * 0.37).sin()).collect();
        let (yp, stats) = spmv_pjds(&p, &x).unwrap();
        let y = permute_vector(&yp, &p.permutation, PermuteDirection::Inverse).unwrap();
        let want = dense_oracle(&m, &x);
        assert!(rel_inf_err(&y, &want) <= 1e-13);
        assert_eq!(stats.idle_lane_cycles, (p.stored_entries() - m.nnz()) as u64);
    }

    #[test]
    fn split_all_local_is_bitwise_csr() {
        let m = generate(&GeneratorSpec {
            n_rows: 40,
            distribution: Distribution::Uniform { lo: 1, hi: 10 },
            seed: 3,
        })
        .unwrap();
        let x: Vec<f64> = (0..40).map(|i| (i as f64).cos()).collect();
        let y = spmv_split(&m, 0..40, &BTreeMap::new(), &x, &[]).unwrap();
        let want = spmv_csr(&m, &x).unwrap();
        let bits_a: Vec<u64> = y.iter().map(|v| v.to_bits()).collect();
        let bits_b: Vec<u64> = want.iter().map(|v| v.to_bits()).collect();
        assert_eq!(bits_a, bits_b);
    }

    #[test]
    fn split_block_diagonal_nonlocal_contributes_zero() {
        // two diagonal blocks; split at the boundary
        let m = CsrMatrix::new(
            4,
            4,
            vec![0, 2, 4, 6, 8],
            vec![0, 1, 0, 1, 2, 3, 2, 3],
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0],
        )
        .unwrap();
        let upper = CsrMatrix::new(
            2,
            4,
            vec![0, 2, 4],
            vec![0, 1, 0, 1],
            vec![1.0, 2.0, 3.0, 4.0],
        )
        .unwrap();
        let x = vec![1.0, 2.0, 3.0, 4.0];
        let y = spmv_split(&upper, 0..2, &BTreeMap::new(), &x[0..2], &[]).unwrap();
        assert_eq!(y, vec![5.0, 11.0]);
        let full = spmv_csr(&m, &x).unwrap();
        assert_eq!(&full[0..2], &y[..]);
    }

    #[test]
    fn split_matches_split_order_recount() {
        let m = generate(&GeneratorSpec {
            n_rows: 50,
            distribution: Distribution::Uniform { lo: 1, hi: 12 },
            seed: 13,
        })
        .unwrap();
        let x: Vec<f64> = (0..50).map(|i| 1.0 / (i + 1) as f64).collect();
        let local = 10..30usize;
        let mut remap = BTreeMap::new();
        let mut buffer = Vec::new();
        for i in 0..m.n_rows {
            for &c in m.row_cols(i) {
                if !local.contains(&c) && !remap.contains_key(&c) {
                    remap.insert(c, 0);
                }
            }
        }
        let keys: Vec<usize> = remap.keys().copied().collect();
        for (slot, c) in keys.iter().enumerate() {
            remap.insert(*c, slot);
            buffer.push(x[*c]);
        }
        let y = spmv_split(&m, local.clone(), &remap, &x[10..30], &buffer).unwrap();
        // independent split-order recount
        for (i, yi) in y.iter().enumerate() {
            let mut sum = 0.0;
            for (c, v) in m.row_cols(i).iter().zip(m.row_values(i)) {
                if local.contains(c) {
                    sum += v * x[*c];
                }
            }
            let mut nonlocal = 0.0;
            for (c, v) in m.row_cols(i).iter().zip(m.row_values(i)) {
                if !local.contains(c) {
                    nonlocal += v * x[*c];
                }
            }
            let want = sum + nonlocal;
            assert_eq!(yi.to_bits(), want.to_bits(), "row {i}");
        }
    }

    #[test]
    fn split_unmapped_column_errors() {
        let m = identity(3);
        let err = spmv_split(&m, 0..1, &BTreeMap::new(), &[1.0], &[]).unwrap_err();
        assert!(matches!(err, Error::UnmappedColumn { .. }));
    }

    #[test]
    fn parallel_bitwise_identical() {
        let m = generate(&GeneratorSpec {
            n_rows: 1000,
            distribution: Distribution::Uniform { lo: 1, hi: 16 },
            seed: 77,
        })
        .unwrap();
        let x: Vec<f64> = (0..1000).map(|i| ((i * 7919) % 1000) as f64 / 321.0).collect();
        let seq = spmv_parallel(&m, &x, 1).unwrap();
        let par = spmv_parallel(&m, &x, 8).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&seq), bits(&par));
        assert_eq!(bits(&seq), bits(&spmv_csr(&m, &x).unwrap()));
    }

    #[test]
    fn parallel_more_chunks_than_rows() {
        let m = generate(&GeneratorSpec {
            n_rows: 20,
            distribution: Distribution::Uniform { lo: 1, hi: 5 },
            seed: 4,
        })
        .unwrap();
        let x: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let seq = spmv_parallel(&m, &x, 1).unwrap();
        let over = spmv_parallel(&m, &x, 50).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&seq), bits(&over));
    }

    #[test]
    fn parallel_works_for_all_formats() {
        let m = generate(&GeneratorSpec {
            n_rows: 33,
            distribution: Distribution::Uniform { lo: 1, hi: 8 },
            seed: 5,
        })
        .unwrap();
        let x: Vec<f64> = (0..33).map(|i| i as f64 - 16.0).collect();
        let e = build_ellpack(&m, 4).unwrap();
        let er = build_ellpack_r(&m, 4).unwrap();
        let p = build_pjds(&m, 4).unwrap();
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(
            bits(&spmv_parallel(&e, &x, 5).unwrap()),
            bits(&spmv_ellpack(&e, &x).unwrap().0)
        );
        assert_eq!(
            bits(&spmv_parallel(&er, &x, 5).unwrap()),
            bits(&spmv_ellpack_r(&er, &x).unwrap().0)
        );
        assert_eq!(
            bits(&spmv_parallel(&p, &x, 5).unwrap()),
            bits(&spmv_pjds(&p, &x).unwrap().0)
        );
    }

    #[test]
    fn stats_conservation() {
        let m = generate(&GeneratorSpec {
            n_rows: 48,
            distribution: Distribution::Uniform { lo: 1, hi: 9 },
            seed: 15,
        })
        .unwrap();
        let x = vec![1.0; 48];
        let e = build_ellpack(&m, 8).unwrap();
        let (_, s) = spmv_ellpack(&e, &x).unwrap();
        assert_eq!(s.useful_fma, m.nnz() as u64);
        assert_eq!(s.useful_fma + s.padded_fma, e.stored_entries() as u64);
        let er = build_ellpack_r(&m, 8).unwrap();
        let (_, s) = spmv_ellpack_r(&er, &x).unwrap();
        assert_eq!(s.useful_fma, m.nnz() as u64);
        assert_eq!(s.padded_fma, 0);
        let p = build_pjds(&m, 8).unwrap();
        let (_, s) = spmv_pjds(&p, &x).unwrap();
        assert_eq!(s.useful_fma, m.nnz() as u64);
        assert_eq!(s.padded_fma, 0);
    }

    #[test]
    fn pjds_constant_rows_stats_match_ellpack_r() {
        // constant row length: no padding anywhere, identical counters
        let m = generate(&GeneratorSpec {
            n_rows: 24,
            distribution: Distribution::Constant { row_len: 5 },
            seed: 11,
        })
        .unwrap();
        let x = vec![1.0; 24];
        let (_, s_er) = spmv_ellpack_r(&build_ellpack_r(&m, 4).unwrap(), &x).unwrap();
        let (_, s_p) = spmv_pjds(&build_pjds(&m, 4).unwrap(), &x).unwrap();
        assert_eq!(s_p, s_er);
        assert_eq!(s_p.padded_fma, 0);
        assert_eq!(s_p.idle_lane_cycles, 0);
    }

    #[test]
    fn pjds_and_ellpack_r_agree() {
        let m = generate(&GeneratorSpec {
            n_rows: 90,
            distribution: Distribution::Clustered {
                peak_fraction: 0.5,
                peak_len: 14,
                tail_lo: 1,
            },
            seed: 27,
        })
        .unwrap();
        let x: Vec<f64> = (0..90).map(|i| ((i * 31) % 17) as f64 - 8.0).collect();
        let er = build_ellpack_r(&m, 4).unwrap();
        let p = build_pjds(&m, 4).unwrap();
        let (y_er, _) = spmv_ellpack_r(&er, &x).unwrap();
        let (yp, _) = spmv_pjds(&p, &x).unwrap();
        let y_p = permute_vector(&yp, &p.permutation, PermuteDirection::Inverse).unwrap();
        assert!(rel_inf_err(&y_p, &y_er) <= 1e-13);
    }

    #[test]
    fn checksum_order_independent() {
        let a = vec![1.5, -2.25, 3.75, 0.0];
        let b = vec![3.75, 1.5, 0.0, -2.25];
        assert_eq!(vector_checksum(&a), vector_checksum(&b));
        assert_ne!(vector_checksum(&a), vector_checksum(&[1.5, -2.25, 3.75, 1.0]));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let id = identity(3);
        assert!(matches!(
            spmv_csr(&id, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
