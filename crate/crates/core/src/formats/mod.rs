//! GPU-oriented storage formats built from CSR.
//!
//! ELLPACK pads every row to the longest row of the matrix and stores the
//! resulting rectangle column-major. ELLPACK-R adds a per-row non-zero count
//! so kernels can skip the padding. pJDS sorts rows by descending length,
//! groups them into blocks of `b_r` consecutive rows, and pads each block
//! only to its own longest row, which removes most of the padding while
//! keeping column-major (coalesced) access.
//!
//! Padding slots hold value 0.0 and column index 0, so a kernel touching
//! them adds a harmless zero and never indexes out of bounds.

mod ellpack;
mod footprint;
mod pjds;

pub use ellpack::{build_ellpack, build_ellpack_r, EllpackMatrix, EllpackRMatrix};
pub use footprint::{csr_min_bytes, FootprintReport};
pub use pjds::{build_pjds, PjdsMatrix};

use crate::error::{Error, Result};

/// Typical SIMD warp width, the default block size.
pub const DEFAULT_WARP_SIZE: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PermuteDirection {
    Forward,
    Inverse,
}

/// Apply a row permutation to a dense vector.
///
/// `p` maps new index -> old index (as stored in [`PjdsMatrix::permutation`]):
/// forward gathers `out[new] = v[p[new]]`, inverse scatters back so that
/// forward followed by inverse is the identity.
pub fn permute_vector(v: &[f64], p: &[usize], direction: PermuteDirection) -> Result<Vec<f64>> {
    if v.len() != p.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            got: v.len(),
        });
    }
    let mut out = vec![0.0; v.len()];
    match direction {
        PermuteDirection::Forward => {
            for (new, &old) in p.iter().enumerate() {
                out[new] = v[old];
            }
        }
        PermuteDirection::Inverse => {
            for (new, &old) in p.iter().enumerate() {
                out[old] = v[new];
            }
        }
    }
    Ok(out)
}

pub(crate) fn round_up(n: usize, multiple: usize) -> usize {
    n.div_ceil(multiple) * multiple
}

pub(crate) fn reject_empty_rows(m: &crate::matrix::CsrMatrix) -> Result<()> {
    match m.first_empty_row() {
        Some(row) => Err(Error::EmptyRow { row }),
        None => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permute_identity() {
        let v = vec![1.0, 2.0, 3.0];
        let p = vec![0, 1, 2];
        assert_eq!(permute_vector(&v, &p, PermuteDirection::Forward).unwrap(), v);
    }

    #[test]
    fn permute_forward_and_inverse() {
        let v = vec![10.0, 20.0, 30.0];
        let p = vec![2, 0, 1];
        let fwd = permute_vector(&v, &p, PermuteDirection::Forward).unwrap();
        assert_eq!(fwd, vec![30.0, 10.0, 20.0]);
        let back = permute_vector(&fwd, &p, PermuteDirection::Inverse).unwrap();
        assert_eq!(back, v);
    }

    #[test]
    fn permute_round_trip_random() {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        let mut p: Vec<usize> = (0..128).collect();
        p.shuffle(&mut rng);
        let v: Vec<f64> = (0..128).map(|i| i as f64 * 0.5 - 3.0).collect();
        let fwd = permute_vector(&v, &p, PermuteDirection::Forward).unwrap();
        let back = permute_vector(&fwd, &p, PermuteDirection::Inverse).unwrap();
        assert_eq!(v, back);
    }

    #[test]
    fn permute_length_mismatch() {
        let err = permute_vector(&[1.0], &[0, 1], PermuteDirection::Forward).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { .. }));
    }
}
