//! Sparse matrix storage formats and spMVM analysis.
//!
//! The crate provides:
//!
//! - canonical CSR/COO representations with Matrix Market ingestion and a
//!   binary snapshot format ([`matrix`]),
//! - GPU-oriented storage formats: ELLPACK, ELLPACK-R, and pJDS (padded
//!   Jagged Diagonals Storage), with exact footprint accounting ([`formats`]),
//! - spMVM kernels for every format, sequential and chunk-parallel, checked
//!   against CSR, with padding/idle-lane utilization counters ([`kernels`]),
//! - a byte-counting performance model for device/PCIe bandwidth trade-offs
//!   ([`perfmodel`]),
//! - a distributed-memory spMVM harness over an in-process rank fabric with
//!   vector-mode/task-mode execution and a deterministic cost simulator
//!   ([`dist`]).
//!
//! ```
//! use spmv_core::formats::{build_pjds, permute_vector, PermuteDirection};
//! use spmv_core::kernels::{spmv_csr, spmv_pjds};
//! use spmv_core::matrix::{generate, Distribution, GeneratorSpec};
//!
//! let m = generate(&GeneratorSpec {
//!     n_rows: 64,
//!     distribution: Distribution::Clustered {
//!         peak_fraction: 0.8,
//!         peak_len: 12,
//!         tail_lo: 2,
//!     },
//!     seed: 7,
//! })?;
//! let pjds = build_pjds(&m, 32)?;
//! assert!(pjds.stored_entries() <= pjds.n_rows_padded * pjds.width);
//!
//! let x = vec![1.0; m.n_cols];
//! let (y_permuted, stats) = spmv_pjds(&pjds, &x)?;
//! let y = permute_vector(&y_permuted, &pjds.permutation, PermuteDirection::Inverse)?;
//! assert_eq!(stats.useful_fma as usize, m.nnz());
//! assert_eq!(y.len(), spmv_csr(&m, &x)?.len());
//! # Ok::<(), spmv_core::Error>(())
//! ```

pub mod dist;
pub mod error;
pub mod formats;
pub mod kernels;
pub mod matrix;
pub mod perfmodel;

pub use error::{Error, Result};

use serde::Serialize;

/// Value precision used in byte accounting. Storage is always f64; SP only
/// changes the modeled byte counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Precision {
    Sp,
    Dp,
}

impl Precision {
    pub fn value_bytes(self) -> u64 {
        match self {
            Precision::Sp => 4,
            Precision::Dp => 8,
        }
    }
}

impl std::fmt::Display for Precision {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Precision::Sp => write!(f, "sp"),
            Precision::Dp => write!(f, "dp"),
        }
    }
}

impl std::str::FromStr for Precision {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "sp" | "single" | "f32" => Ok(Precision::Sp),
            "dp" | "double" | "f64" => Ok(Precision::Dp),
            other => Err(format!("unknown precision '{other}' (expected sp or dp)")),
        }
    }
}
