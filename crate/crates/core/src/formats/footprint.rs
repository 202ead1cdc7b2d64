//! Memory footprint accounting for the storage formats.
//!
//! Byte accounting is modeled, not measured: values take 8 bytes (DP) or
//! 4 bytes (SP), indices 4 bytes, `col_start` and `rowmax` entries 4 bytes,
//! regardless of the in-memory representation.

use serde::Serialize;

use crate::matrix::CsrMatrix;
use crate::Precision;

use super::{EllpackMatrix, EllpackRMatrix, PjdsMatrix};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FootprintReport {
    pub format: String,
    pub stored_entries: usize,
    pub bytes_values: u64,
    pub bytes_indices: u64,
    /// Metadata bytes: `rowmax` for ELLPACK-R, `rowmax` + `col_start` for pJDS.
    pub bytes_aux: u64,
    /// stored / nnz - 1
    pub padding_overhead_fraction: f64,
    /// 1 - stored / stored_ellpack, against ELLPACK of the same source at
    /// warp_size = b_r.
    pub data_reduction_vs_ellpack: f64,
}

impl FootprintReport {
    pub fn total_bytes(&self) -> u64 {
        self.bytes_values + self.bytes_indices + self.bytes_aux
    }

    /// Line-oriented `key=value` rendering, one field per line.
    pub fn to_kv(&self) -> String {
        format!(
            "format={}\nstored_entries={}\nbytes_values={}\nbytes_indices={}\nbytes_aux={}\npadding_overhead_fraction={}\ndata_reduction_vs_ellpack={}\n",
            self.format,
            self.stored_entries,
            self.bytes_values,
            self.bytes_indices,
            self.bytes_aux,
            self.padding_overhead_fraction,
            self.data_reduction_vs_ellpack
        )
    }
}

fn report(
    format: &str,
    stored: usize,
    nnz: usize,
    ellpack_stored: usize,
    bytes_aux: u64,
    precision: Precision,
) -> FootprintReport {
    FootprintReport {
        format: format.to_string(),
        stored_entries: stored,
        bytes_values: stored as u64 * precision.value_bytes(),
        bytes_indices: stored as u64 * 4,
        bytes_aux,
        padding_overhead_fraction: stored as f64 / nnz as f64 - 1.0,
        data_reduction_vs_ellpack: 1.0 - stored as f64 / ellpack_stored as f64,
    }
}

impl EllpackMatrix {
    pub fn footprint(&self, precision: Precision) -> FootprintReport {
        let stored = self.stored_entries();
        report("ellpack", stored, self.nnz, stored, 0, precision)
    }
}

impl EllpackRMatrix {
    pub fn footprint(&self, precision: Precision) -> FootprintReport {
        let stored = self.stored_entries();
        report(
            "ellpack-r",
            stored,
            self.nnz,
            stored,
            self.n_rows_padded as u64 * 4,
            precision,
        )
    }
}

impl PjdsMatrix {
    pub fn footprint(&self, precision: Precision) -> FootprintReport {
        let stored = self.stored_entries();
        // ELLPACK of the same source at warp_size = block_rows pads the rows
        // identically, so its stored count is the full rectangle.
        let ellpack_stored = self.n_rows_padded * self.width;
        report(
            "pjds",
            stored,
            self.nnz,
            ellpack_stored,
            (self.col_start.len() + self.n_rows_padded) as u64 * 4,
            precision,
        )
    }
}

/// Bytes of a minimum CSR-like implementation storing only the non-zeros:
/// values, column indices (4 bytes each), and one 4-byte row pointer per
/// row plus one.
pub fn csr_min_bytes(m: &CsrMatrix, precision: Precision) -> u64 {
    m.nnz() as u64 * (precision.value_bytes() + 4) + (m.n_rows as u64 + 1) * 4
}
