//! Shared test helpers: the dense brute-force oracle and error norms.
//!
//! The oracle materializes the full matrix and multiplies it row by row, so
//! it is independent of every sparse kernel it checks.

use spmv_core::matrix::CsrMatrix;

/// y = A x through a dense materialization of A.
pub fn dense_spmv_oracle(m: &CsrMatrix, x: &[f64]) -> Vec<f64> {
    assert_eq!(m.n_cols, x.len());
    let mut dense = vec![vec![0.0f64; m.n_cols]; m.n_rows];
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

/// Relative infinity-norm error of `got` against `want`.
pub fn rel_inf_err(got: &[f64], want: &[f64]) -> f64 {
    assert_eq!(got.len(), want.len());
    let denom = want.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let err = got
        .iter()
        .zip(want)
        .fold(0.0f64, |a, (g, w)| a.max((g - w).abs()));
    if denom == 0.0 {
        err
    } else {
        err / denom
    }
}

/// Deterministic pseudo-random RHS that exercises signs and magnitudes.
pub fn test_rhs(n: usize, seed: u64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let h = (i as u64)
                .wrapping_mul(0x9e3779b97f4a7c15)
                .wrapping_add(seed.wrapping_mul(0xbf58476d1ce4e5b9));
            let mantissa = (h >> 11) as f64 / (1u64 << 53) as f64;
            mantissa * 4.0 - 2.0
        })
        .collect()
}

pub fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}
