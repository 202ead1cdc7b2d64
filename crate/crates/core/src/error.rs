//! Error type shared across the crate.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("entry ({row}, {col}) out of bounds for {n_rows}x{n_cols} matrix (line {line})")]
    IndexOutOfBounds {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
        line: usize,
    },

    #[error("unsupported matrix file: {0}")]
    UnsupportedFormat(String),

    #[error("duplicate entry at ({row}, {col})")]
    DuplicateEntry { row: usize, col: usize },

    #[error("invalid matrix structure: {0}")]
    InvalidMatrix(String),

    #[error("row {row} has no non-zero entries")]
    EmptyRow { row: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),

    #[error("snapshot format error: {0}")]
    Snapshot(String),

    #[error("column {col} is nonlocal but has no buffer slot")]
    UnmappedColumn { col: usize },

    #[error("cannot split {n_rows} rows over {n_ranks} ranks")]
    TooManyRanks { n_ranks: usize, n_rows: usize },

    #[error("halo schedule does not match the provided blocks: {0}")]
    ScheduleMismatch(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("bandwidth ratio {ratio} <= 1: PCIe transfer dominates for every row count")]
    UnboundedPenalty { ratio: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
