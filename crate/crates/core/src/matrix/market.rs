//! Matrix Market coordinate file reader and writer.
//!
//! Supports `real` and `integer` fields with `general` or `symmetric`
//! symmetry. Symmetric files are expanded to full storage on read.
//! Pattern and complex files are rejected.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::matrix::CooMatrix;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Read a Matrix Market coordinate file into a COO matrix.
///
/// One-based indices are converted to zero-based. For symmetric files every
/// off-diagonal entry (i, j) is mirrored to (j, i). Comment lines (`%`) are
/// ignored. Errors carry the offending 1-based line number.
pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CooMatrix> {
    let file = File::open(path.as_ref())?;
    read_matrix_market_from(BufReader::new(file))
}

fn read_matrix_market_from(reader: impl BufRead) -> Result<CooMatrix> {
    let mut lines = reader.lines().enumerate();

    // Banner: %%MatrixMarket matrix coordinate <field> <symmetry>
    let (_, banner) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty file"))?;
    let banner = banner?;
    let tokens: Vec<&str> = banner.split_whitespace().collect();
    if tokens.len() != 5 || !tokens[0].eq_ignore_ascii_case("%%MatrixMarket") {
        return Err(parse_err(1, "missing or malformed MatrixMarket banner"));
    }
    if !tokens[1].eq_ignore_ascii_case("matrix") || !tokens[2].eq_ignore_ascii_case("coordinate") {
        return Err(Error::UnsupportedFormat(format!(
            "only 'matrix coordinate' files are supported, got '{} {}'",
            tokens[1], tokens[2]
        )));
    }
    let field = tokens[3].to_ascii_lowercase();
    match field.as_str() {
        "real" | "integer" => {}
        "pattern" => {
            return Err(Error::UnsupportedFormat(
                "pattern files carry no values; supply a real or integer file".into(),
            ))
        }
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "unsupported field type '{other}' (expected real or integer)"
            )))
        }
    }
    let symmetric = match tokens[4].to_ascii_lowercase().as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "unsupported symmetry '{other}' (expected general or symmetric)"
            )))
        }
    };

    // Size line: first non-comment, non-blank line after the banner.
    let mut size: Option<(usize, usize, usize, usize)> = None;
    let mut coo = CooMatrix::new(0, 0);
    let mut seen = 0usize;
    for (idx, line) in lines {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(parse_err(
                        lineno,
                        format!("size line must be 'rows cols nnz', got {} fields", fields.len()),
                    ));
                }
                let n_rows: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(lineno, "cannot parse row count"))?;
                let n_cols: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, "cannot parse column count"))?;
                let nnz: usize = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, "cannot parse entry count"))?;
                if n_rows == 0 || n_cols == 0 {
                    return Err(parse_err(lineno, "matrix dimensions must be positive"));
                }
                coo = CooMatrix::new(n_rows, n_cols);
                size = Some((n_rows, n_cols, nnz, lineno));
            }
            Some((n_rows, n_cols, nnz, _)) => {
                if seen == nnz {
                    return Err(parse_err(lineno, "more entries than declared"));
                }
                if fields.len() != 3 {
                    return Err(parse_err(
                        lineno,
                        format!("entry must be 'row col value', got {} fields", fields.len()),
                    ));
                }
                let r: usize = fields[0]
                    .parse()
                    .map_err(|_| parse_err(lineno, "cannot parse row index"))?;
                let c: usize = fields[1]
                    .parse()
                    .map_err(|_| parse_err(lineno, "cannot parse column index"))?;
                let v: f64 = fields[2]
                    .parse()
                    .map_err(|_| parse_err(lineno, "cannot parse value"))?;
                if r < 1 || r > n_rows || c < 1 || c > n_cols {
                    return Err(Error::IndexOutOfBounds {
                        row: r,
                        col: c,
                        n_rows,
                        n_cols,
                        line: lineno,
                    });
                }
                let (r, c) = (r - 1, c - 1);
                coo.entries.push((r, c, v));
                if symmetric && r != c {
                    coo.entries.push((c, r, v));
                }
                seen += 1;
            }
        }
    }
    let (_, _, nnz, size_line) = size.ok_or_else(|| parse_err(1, "missing size line"))?;
    if seen != nnz {
        return Err(parse_err(
            size_line,
            format!("declared {nnz} entries but file contains {seen}"),
        ));
    }
    Ok(coo)
}

/// Write a COO matrix as a general real coordinate file (1-based indices).
pub fn write_matrix_market(path: impl AsRef<Path>, m: &CooMatrix) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut w = BufWriter::new(file);
    writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
    writeln!(w, "{} {} {}", m.n_rows, m.n_cols, m.nnz())?;
    for &(r, c, v) in &m.entries {
        writeln!(w, "{} {} {:.17e}", r + 1, c + 1, v)?;
    }
    w.flush()?;
    Ok(())
}
