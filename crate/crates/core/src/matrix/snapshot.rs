//! Versioned binary CSR snapshot for fast reload.
//!
//! Layout (little-endian): magic `JGD1`, then `n_rows`, `n_cols`, `nnz` as
//! u64, then `row_ptr` (n_rows+1 u64), `col_idx` (nnz u64), `values`
//! (nnz IEEE-754 binary64).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::CsrMatrix;

pub const SNAPSHOT_MAGIC: [u8; 4] = *b"JGD1";

pub fn write_snapshot(path: impl AsRef<Path>, m: &CsrMatrix) -> Result<()> {
    let mut w = BufWriter::new(File::create(path.as_ref())?);
    w.write_all(&SNAPSHOT_MAGIC)?;
    w.write_all(&(m.n_rows as u64).to_le_bytes())?;
    w.write_all(&(m.n_cols as u64).to_le_bytes())?;
    w.write_all(&(m.nnz() as u64).to_le_bytes())?;
    for &p in &m.row_ptr {
        w.write_all(&(p as u64).to_le_bytes())?;
    }
    for &c in &m.col_idx {
        w.write_all(&(c as u64).to_le_bytes())?;
    }
    for &v in &m.values {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let mut r = BufReader::new(File::open(path.as_ref())?);
    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic)?;
    if magic != SNAPSHOT_MAGIC {
        return Err(Error::Snapshot(format!(
            "bad magic {magic:?}, expected {SNAPSHOT_MAGIC:?}"
        )));
    }
    let n_rows = read_u64(&mut r)? as usize;
    let n_cols = read_u64(&mut r)? as usize;
    let nnz = read_u64(&mut r)? as usize;
    let mut row_ptr = Vec::with_capacity(n_rows + 1);
    for _ in 0..=n_rows {
        row_ptr.push(read_u64(&mut r)? as usize);
    }
    let mut col_idx = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        col_idx.push(read_u64(&mut r)? as usize);
    }
    let mut values = Vec::with_capacity(nnz);
    let mut buf = [0u8; 8];
    for _ in 0..nnz {
        read_exact(&mut r, &mut buf)?;
        values.push(f64::from_le_bytes(buf));
    }
    CsrMatrix::new(n_rows, n_cols, row_ptr, col_idx, values)
}

fn read_u64(r: &mut impl Read) -> Result<u64> {
    let mut buf = [0u8; 8];
    read_exact(r, &mut buf)?;
    Ok(u64::from_le_bytes(buf))
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> Result<()> {
    r.read_exact(buf)
        .map_err(|_| Error::Snapshot("truncated snapshot".into()))
}
