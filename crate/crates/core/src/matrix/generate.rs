//! Synthetic square matrices with controllable row-length distributions.
//!
//! Generation is deterministic given the seed: row lengths are drawn first,
//! then distinct column indices per row, then values uniform in [-1, 1].
//! Every generated row has at least one non-zero.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::CsrMatrix;

/// Row-length distribution family.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    /// Every row has exactly `row_len` non-zeros.
    Constant { row_len: usize },
    /// Row lengths drawn uniformly from `lo..=hi`.
    Uniform { lo: usize, hi: usize },
    /// `peak_fraction` of the rows have exactly `peak_len` non-zeros; the
    /// rest draw their length uniformly from `tail_lo..=peak_len`. Peak rows
    /// are scattered over the matrix.
    Clustered {
        peak_fraction: f64,
        peak_len: usize,
        tail_lo: usize,
    },
    /// One fully populated row (row 0), a single entry in all others.
    Adversarial,
    /// Off-diagonals at the given offsets; row i holds a non-zero at column
    /// i+o for every offset o that lands inside the matrix.
    Banded { offsets: Vec<i64> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub n_rows: usize,
    pub distribution: Distribution,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Parse a compact spec string, e.g. `constant(64,3)`, `uniform(64,1,4)`,
    /// `clustered(100,0.8,16,2)`, `adversarial(64)`, `banded(64,-1;0;1)`.
    pub fn parse(s: &str, seed: u64) -> Result<GeneratorSpec> {
        let s = s.trim();
        let bad = |msg: &str| Error::InfeasibleSpec(format!("cannot parse '{s}': {msg}"));
        let open = s.find('(').ok_or_else(|| bad("missing '('"))?;
        if !s.ends_with(')') {
            return Err(bad("missing ')'"));
        }
        let name = &s[..open];
        let args: Vec<&str> = s[open + 1..s.len() - 1]
            .split(',')
            .map(str::trim)
            .collect();
        let usize_arg = |i: usize| -> Result<usize> {
            args.get(i)
                .ok_or_else(|| bad("too few arguments"))?
                .parse()
                .map_err(|_| bad("expected an integer argument"))
        };
        let (n_rows, distribution) = match name {
            "constant" => (usize_arg(0)?, Distribution::Constant { row_len: usize_arg(1)? }),
            "uniform" => (
                usize_arg(0)?,
                Distribution::Uniform {
                    lo: usize_arg(1)?,
                    hi: usize_arg(2)?,
                },
            ),
            "clustered" => (
                usize_arg(0)?,
                Distribution::Clustered {
                    peak_fraction: args
                        .get(1)
                        .ok_or_else(|| bad("too few arguments"))?
                        .parse()
                        .map_err(|_| bad("expected a fraction"))?,
                    peak_len: usize_arg(2)?,
                    tail_lo: usize_arg(3)?,
                },
            ),
            "adversarial" => (usize_arg(0)?, Distribution::Adversarial),
            "banded" => {
                let offsets = args
                    .get(1)
                    .ok_or_else(|| bad("missing offsets"))?
                    .split(';')
                    .map(|t| t.trim().parse::<i64>().map_err(|_| bad("bad offset")))
                    .collect::<Result<Vec<_>>>()?;
                (usize_arg(0)?, Distribution::Banded { offsets })
            }
            other => return Err(bad(&format!("unknown family '{other}'"))),
        };
        Ok(GeneratorSpec {
            n_rows,
            distribution,
            seed,
        })
    }
}

/// Generate a square CSR matrix following the spec's row-length distribution.
pub fn generate(spec: &GeneratorSpec) -> Result<CsrMatrix> {
    let n = spec.n_rows;
    if n == 0 {
        return Err(Error::InfeasibleSpec("n_rows must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let lengths = draw_lengths(spec, n, &mut rng)?;

    let mut row_ptr = Vec::with_capacity(n + 1);
    row_ptr.push(0usize);
    let nnz: usize = lengths.iter().sum();
    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    for (i, &len) in lengths.iter().enumerate() {
        let cols = match &spec.distribution {
            Distribution::Banded { offsets } => banded_row_cols(i, n, offsets),
            _ => sample_distinct_cols(len, n, &mut rng),
        };
        debug_assert_eq!(cols.len(), len);
        for c in cols {
            col_idx.push(c);
            values.push(rng.gen_range(-1.0..=1.0));
        }
        row_ptr.push(col_idx.len());
    }
    CsrMatrix::new(n, n, row_ptr, col_idx, values)
}

fn draw_lengths(spec: &GeneratorSpec, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    match &spec.distribution {
        Distribution::Constant { row_len } => {
            check_len(*row_len, n)?;
            Ok(vec![*row_len; n])
        }
        Distribution::Uniform { lo, hi } => {
            if lo > hi {
                return Err(Error::InfeasibleSpec(format!("uniform lo {lo} > hi {hi}")));
            }
            check_len(*lo, n)?;
            check_len(*hi, n)?;
            Ok((0..n).map(|_| rng.gen_range(*lo..=*hi)).collect())
        }
        Distribution::Clustered {
            peak_fraction,
            peak_len,
            tail_lo,
        } => {
            if !(0.0..=1.0).contains(peak_fraction) {
                return Err(Error::InfeasibleSpec(format!(
                    "peak_fraction {peak_fraction} outside [0, 1]"
                )));
            }
            check_len(*peak_len, n)?;
            check_len(*tail_lo, n)?;
            if tail_lo > peak_len {
                return Err(Error::InfeasibleSpec(format!(
                    "tail_lo {tail_lo} exceeds peak_len {peak_len}"
                )));
            }
            let n_peak = ((peak_fraction * n as f64).ceil() as usize).min(n);
            let mut lengths: Vec<usize> = (0..n)
                .map(|i| {
                    if i < n_peak {
                        *peak_len
                    } else {
                        rng.gen_range(*tail_lo..=*peak_len)
                    }
                })
                .collect();
            // scatter peak rows over the matrix (Fisher-Yates)
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                lengths.swap(i, j);
            }
            Ok(lengths)
        }
        Distribution::Adversarial => {
            let mut lengths = vec![1usize; n];
            lengths[0] = n;
            Ok(lengths)
        }
        Distribution::Banded { offsets } => {
            if offsets.is_empty() {
                return Err(Error::InfeasibleSpec("banded needs at least one offset".into()));
            }
            let mut lengths = Vec::with_capacity(n);
            for i in 0..n {
                let len = banded_row_cols(i, n, offsets).len();
                if len == 0 {
                    return Err(Error::InfeasibleSpec(format!(
                        "banded offsets leave row {i} empty"
                    )));
                }
                lengths.push(len);
            }
            Ok(lengths)
        }
    }
}

fn check_len(len: usize, n_cols: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::InfeasibleSpec("row length must be at least 1".into()));
    }
    if len > n_cols {
        return Err(Error::InfeasibleSpec(format!(
            "row length {len} exceeds {n_cols} columns"
        )));
    }
    Ok(())
}

fn banded_row_cols(row: usize, n: usize, offsets: &[i64]) -> Vec<usize> {
    let mut cols: Vec<usize> = offsets
        .iter()
        .filter_map(|&o| {
            let c = row as i64 + o;
            (c >= 0 && c < n as i64).then_some(c as usize)
        })
        .collect();
    cols.sort_unstable();
    cols.dedup();
    cols
}

/// Draw `len` distinct columns from `0..n`, ascending.
fn sample_distinct_cols(len: usize, n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if len == n {
        return (0..n).collect();
    }
    if len * 2 > n {
        // dense row: sample the complement instead
        let excluded = sample_distinct_cols(n - len, n, rng);
        let excl: HashSet<usize> = excluded.into_iter().collect();
        return (0..n).filter(|c| !excl.contains(c)).collect();
    }
    let mut picked = HashSet::with_capacity(len);
    let mut cols = Vec::with_capacity(len);
    while cols.len() < len {
        let c = rng.gen_range(0..n);
        if picked.insert(c) {
            cols.push(c);
        }
    }
    cols.sort_unstable();
    cols
}
