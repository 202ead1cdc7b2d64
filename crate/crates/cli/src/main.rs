//! `spmv` — sparse matrix storage-format analysis on the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spmv_core::dist::{
    build_halo, partition_with, run_mode_with_format, simulate_cost, split_order_reference,
    timeline_to_chrome_trace, timeline_to_csv, BlockFormat, CostParams, Mode, PartitionStrategy,
};
use spmv_core::formats::{
    build_ellpack, build_ellpack_r, build_pjds, csr_min_bytes, permute_vector, PermuteDirection,
    DEFAULT_WARP_SIZE,
};
use spmv_core::kernels::{
    spmv_csr, spmv_ellpack, spmv_ellpack_r, spmv_parallel, spmv_pjds, vector_checksum,
};
use spmv_core::matrix::{
    coo_to_csr, generate, histogram, read_matrix_market, read_snapshot, write_matrix_market,
    write_snapshot, CsrMatrix, GeneratorSpec,
};
use spmv_core::perfmodel::{report, threshold_lower, threshold_upper, AlphaMode, ModelParams};
use spmv_core::{Error, Precision};

#[derive(Parser)]
#[command(
    name = "spmv",
    version,
    about = "Sparse matrix storage formats (CSR, ELLPACK, ELLPACK-R, pJDS): conversion, footprint and spMVM analysis, bandwidth modeling, distributed runs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Matrix source: a file or a generator spec, never both.
#[derive(Args)]
struct MatrixSource {
    /// Matrix file (.mtx Matrix Market, .jgd binary snapshot)
    #[arg(long, conflicts_with = "generate_spec")]
    input: Option<PathBuf>,
    /// Generator spec, e.g. constant(64,3), uniform(64,1,4),
    /// clustered(1000,0.8,16,2), adversarial(1024), banded(256,-1;0;1)
    #[arg(long)]
    generate_spec: Option<String>,
    /// Seed for the generator
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl MatrixSource {
    fn load(&self) -> Result<CsrMatrix, Error> {
        match (&self.input, &self.generate_spec) {
            (Some(path), None) => load_matrix_file(path),
            (None, Some(spec)) => generate(&GeneratorSpec::parse(spec, self.seed)?),
            _ => Err(Error::InvalidParams(
                "exactly one of --input and --generate-spec is required".into(),
            )),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic matrix and write it to a file
    Generate {
        /// Generator spec, e.g. constant(64,3) or banded(256,-1;0;1)
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file (.mtx or .jgd, by extension)
        #[arg(long)]
        output: PathBuf,
    },
    /// Convert between Matrix Market (.mtx) and binary snapshot (.jgd)
    Convert {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Row length histogram
    Histogram {
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long)]
        json: bool,
        /// Write the report here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Memory footprint of ELLPACK, ELLPACK-R, and pJDS storage
    Footprint {
        #[command(flatten)]
        source: MatrixSource,
        /// pJDS block size
        #[arg(long, default_value_t = DEFAULT_WARP_SIZE)]
        block_rows: usize,
        /// ELLPACK row-padding multiple (defaults to --block-rows)
        #[arg(long)]
        warp_size: Option<usize>,
        /// Restrict to one format: ellpack, ellpack-r, pjds, or all
        #[arg(long, default_value = "all")]
        format: String,
        #[arg(long, default_value = "dp")]
        precision: Precision,
        #[arg(long)]
        json: bool,
        /// Emit line-oriented key=value blocks instead of the table
        #[arg(long, conflicts_with = "json")]
        kv: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run every kernel against the CSR reference and report errors and
    /// utilization counters
    SpmvCheck {
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long, default_value_t = DEFAULT_WARP_SIZE)]
        block_rows: usize,
        /// Restrict to one format: ellpack, ellpack-r, pjds, or all
        #[arg(long, default_value = "all")]
        format: String,
        /// Also run the chunk-parallel kernel with this many chunks
        #[arg(long)]
        chunks: Option<usize>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Bandwidth model: code balance, transfer times, favorable-n_nzr
    /// thresholds
    Model {
        /// Device/PCIe bandwidth ratio (overrides --b-gpu)
        #[arg(long)]
        ratio: Option<f64>,
        /// Device memory bandwidth, bytes/s
        #[arg(long, default_value_t = 91e9)]
        b_gpu: f64,
        /// PCIe bandwidth, bytes/s
        #[arg(long, default_value_t = 8e9)]
        b_pci: f64,
        /// RHS cache-reuse factor: "reciprocal" or a number in (0, 1]
        #[arg(long, default_value = "1.0")]
        alpha: String,
        /// Average non-zeros per row (alternative to a matrix source)
        #[arg(long)]
        n_nzr: Option<f64>,
        /// Row count used with --n-nzr
        #[arg(long, default_value_t = 1_000_000)]
        n_rows: usize,
        #[command(flatten)]
        source: OptionalMatrixSource,
        /// Account for the split local/nonlocal kernel
        #[arg(long)]
        split: bool,
        /// Fraction of the RHS/LHS vectors crossing the PCIe bus per spMVM
        #[arg(long, default_value_t = 1.0)]
        pci_residency: f64,
        #[arg(long, default_value = "dp")]
        precision: Precision,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Distributed spMVM: concurrent run plus cost-model timeline
    DistRun {
        #[command(flatten)]
        source: MatrixSource,
        #[arg(long)]
        ranks: usize,
        /// plain, naive, task, or all
        #[arg(long, default_value = "all")]
        mode: String,
        /// rows or nnz
        #[arg(long, default_value = "rows")]
        balance: String,
        /// Per-rank block storage: ellpack-r, or pjds (experimental)
        #[arg(long, default_value = "ellpack-r")]
        block_format: String,
        /// Cost parameters "link_bw,latency,pci_bw,gpu_bw[,alpha]" or "default"
        #[arg(long, default_value = "default")]
        cost: String,
        /// Write a Chrome-trace JSON timeline here (last mode run)
        #[arg(long)]
        trace: Option<PathBuf>,
        /// Write the timeline CSV here instead of stdout (last mode run)
        #[arg(long)]
        trace_csv: Option<PathBuf>,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Like [`MatrixSource`] but optional as a whole (the model command can run
/// from --n-nzr alone).
#[derive(Args)]
struct OptionalMatrixSource {
    #[arg(long, conflicts_with = "generate_spec")]
    input: Option<PathBuf>,
    #[arg(long)]
    generate_spec: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not usage errors
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

enum CliError {
    Usage(String),
    Data(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Data(e)
    }
}

fn load_matrix_file(path: &Path) -> Result<CsrMatrix, Error> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("jgd") | Some("jgd1") => read_snapshot(path),
        _ => coo_to_csr(&read_matrix_market(path)?),
    }
}

fn write_report(output: Option<&Path>, text: &str) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Deterministic RHS in [-1, 1] derived from a seed.
fn seeded_rhs(n: usize, seed: u64, mix: u64) -> Vec<f64> {
    (0..n)
        .map(|i| {
            let h = (i as u64).wrapping_mul(mix).wrapping_add(seed);
            (h >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        })
        .collect()
}

fn parse_alpha(s: &str) -> Result<AlphaMode, CliError> {
    if s.eq_ignore_ascii_case("reciprocal") {
        return Ok(AlphaMode::Reciprocal);
    }
    s.parse::<f64>()
        .map(AlphaMode::Fixed)
        .map_err(|_| CliError::Usage(format!("--alpha expects 'reciprocal' or a number, got '{s}'")))
}

fn parse_cost(s: &str) -> Result<CostParams, CliError> {
    if s.eq_ignore_ascii_case("default") {
        return Ok(CostParams::default());
    }
    let fields: Vec<&str> = s.split(',').map(str::trim).collect();
    if fields.len() != 4 && fields.len() != 5 {
        return Err(CliError::Usage(
            "--cost expects 'link_bw,latency,pci_bw,gpu_bw[,alpha]' or 'default'".into(),
        ));
    }
    let num = |i: usize| -> Result<f64, CliError> {
        fields[i]
            .parse()
            .map_err(|_| CliError::Usage(format!("--cost field '{}' is not a number", fields[i])))
    };
    Ok(CostParams {
        link_bandwidth: num(0)?,
        link_latency: num(1)?,
        pci_bandwidth: num(2)?,
        device_bandwidth: num(3)?,
        alpha: if fields.len() == 5 { num(4)? } else { 1.0 },
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Generate { spec, seed, output } => cmd_generate(&spec, seed, &output),
        Command::Convert { input, output } => cmd_convert(&input, &output),
        Command::Histogram {
            source,
            json,
            output,
        } => cmd_histogram(&source, json, output.as_deref()),
        Command::Footprint {
            source,
            block_rows,
            warp_size,
            format,
            precision,
            json,
            kv,
            output,
        } => cmd_footprint(
            &source,
            block_rows,
            warp_size,
            &format,
            precision,
            json,
            kv,
            output.as_deref(),
        ),
        Command::SpmvCheck {
            source,
            block_rows,
            format,
            chunks,
            json,
            output,
        } => cmd_spmv_check(&source, block_rows, &format, chunks, json, output.as_deref()),
        Command::Model {
            ratio,
            b_gpu,
            b_pci,
            alpha,
            n_nzr,
            n_rows,
            source,
            split,
            pci_residency,
            precision,
            json,
            output,
        } => cmd_model(
            ratio,
            b_gpu,
            b_pci,
            &alpha,
            n_nzr,
            n_rows,
            &source,
            split,
            pci_residency,
            precision,
            json,
            output.as_deref(),
        ),
        Command::DistRun {
            source,
            ranks,
            mode,
            balance,
            block_format,
            cost,
            trace,
            trace_csv,
            json,
            output,
        } => cmd_dist_run(
            &source,
            ranks,
            &mode,
            &balance,
            &block_format,
            &cost,
            trace.as_deref(),
            trace_csv.as_deref(),
            json,
            output.as_deref(),
        ),
    }
}

fn cmd_generate(spec: &str, seed: u64, output: &Path) -> Result<(), CliError> {
    let m = generate(&GeneratorSpec::parse(spec, seed)?)?;
    match output.extension().and_then(|e| e.to_str()) {
        Some("jgd") | Some("jgd1") => write_snapshot(output, &m)?,
        _ => write_matrix_market(output, &m.to_coo())?,
    }
    let h = histogram(&m);
    println!(
        "wrote {} ({} rows, {} non-zeros, row lengths {}..{}, mean {:.3})",
        output.display(),
        m.n_rows,
        m.nnz(),
        h.min_len,
        h.max_len,
        h.mean_len
    );
    Ok(())
}

fn cmd_convert(input: &Path, output: &Path) -> Result<(), CliError> {
    let m = load_matrix_file(input)?;
    match output.extension().and_then(|e| e.to_str()) {
        Some("jgd") | Some("jgd1") => write_snapshot(output, &m)?,
        _ => write_matrix_market(output, &m.to_coo())?,
    }
    println!(
        "wrote {} ({} x {}, {} non-zeros)",
        output.display(),
        m.n_rows,
        m.n_cols,
        m.nnz()
    );
    Ok(())
}

fn cmd_histogram(source: &MatrixSource, json: bool, output: Option<&Path>) -> Result<(), CliError> {
    let m = source.load()?;
    let h = histogram(&m);
    let text = if json {
        format!("{}\n", serde_json::to_string_pretty(&h).unwrap())
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "  row_len  rows");
        for (len, count) in &h.bins {
            let _ = writeln!(s, "  {len:>7}  {count}");
        }
        let _ = writeln!(
            s,
            "  min {} / max {} / mean {:.4} over {} rows",
            h.min_len,
            h.max_len,
            h.mean_len,
            h.n_rows()
        );
        s
    };
    write_report(output, &text)?;
    Ok(())
}

/// None = all formats.
fn parse_format_filter(s: &str) -> Result<Option<String>, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "all" => Ok(None),
        "ellpack" | "ellpack-r" | "pjds" => Ok(Some(s.to_ascii_lowercase())),
        other => Err(CliError::Usage(format!(
            "--format expects ellpack, ellpack-r, pjds, or all, got '{other}'"
        ))),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_footprint(
    source: &MatrixSource,
    block_rows: usize,
    warp_size: Option<usize>,
    format: &str,
    precision: Precision,
    json: bool,
    kv: bool,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let filter = parse_format_filter(format)?;
    let m = source.load()?;
    let warp = warp_size.unwrap_or(block_rows);
    let reports: Vec<_> = [
        build_ellpack(&m, warp)?.footprint(precision),
        build_ellpack_r(&m, warp)?.footprint(precision),
        build_pjds(&m, block_rows)?.footprint(precision),
    ]
    .into_iter()
    .filter(|r| filter.as_deref().is_none_or(|f| r.format == f))
    .collect();
    let min_bytes = csr_min_bytes(&m, precision);
    let text = if kv {
        let blocks: Vec<String> = reports.iter().map(|r| r.to_kv()).collect();
        blocks.join("\n")
    } else if json {
        let doc = serde_json::json!({
            "nnz": m.nnz(),
            "n_rows": m.n_rows,
            "csr_min_bytes": min_bytes,
            "formats": reports,
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
    } else {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "  {:<10} {:>12} {:>12} {:>12} {:>10} {:>12} {:>10} {:>10}",
            "format", "stored", "bytes_val", "bytes_idx", "bytes_aux", "total", "padding", "reduction"
        );
        for r in &reports {
            let _ = writeln!(
                s,
                "  {:<10} {:>12} {:>12} {:>12} {:>10} {:>12} {:>9.4}% {:>9.2}%",
                r.format,
                r.stored_entries,
                r.bytes_values,
                r.bytes_indices,
                r.bytes_aux,
                r.total_bytes(),
                100.0 * r.padding_overhead_fraction,
                100.0 * r.data_reduction_vs_ellpack
            );
        }
        let _ = writeln!(
            s,
            "  minimum CSR-like bytes: {min_bytes} ({} non-zeros)",
            m.nnz()
        );
        s
    };
    write_report(output, &text)?;
    Ok(())
}

fn cmd_spmv_check(
    source: &MatrixSource,
    block_rows: usize,
    format: &str,
    chunks: Option<usize>,
    json: bool,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let filter = parse_format_filter(format)?;
    let m = source.load()?;
    let x = seeded_rhs(m.n_cols, source.seed, 0x9e3779b97f4a7c15);
    let reference = spmv_csr(&m, &x)?;
    let denom = reference.iter().fold(0.0f64, |a, b| a.max(b.abs())).max(1e-300);
    let rel_err = |y: &[f64]| {
        y.iter()
            .zip(&reference)
            .fold(0.0f64, |a, (g, w)| a.max((g - w).abs()))
            / denom
    };

    let ellpack = build_ellpack(&m, block_rows)?;
    let (y_e, s_e) = spmv_ellpack(&ellpack, &x)?;
    let ellpack_r = build_ellpack_r(&m, block_rows)?;
    let (y_r, s_r) = spmv_ellpack_r(&ellpack_r, &x)?;
    let pjds = build_pjds(&m, block_rows)?;
    let (y_p_perm, s_p) = spmv_pjds(&pjds, &x)?;
    let y_p = permute_vector(&y_p_perm, &pjds.permutation, PermuteDirection::Inverse)?;

    let rows: Vec<_> = [
        ("ellpack", rel_err(&y_e), s_e, vector_checksum(&y_e)),
        ("ellpack-r", rel_err(&y_r), s_r, vector_checksum(&y_r)),
        ("pjds", rel_err(&y_p), s_p, vector_checksum(&y_p)),
    ]
    .into_iter()
    .filter(|(name, ..)| filter.as_deref().is_none_or(|f| *name == f))
    .collect();
    let parallel_checksum = match chunks {
        Some(c) => Some(vector_checksum(&spmv_parallel(&m, &x, c)?)),
        None => None,
    };
    let reference_checksum = vector_checksum(&reference);

    let tolerance = 1e-13;
    let text = if json {
        let doc = serde_json::json!({
            "reference_checksum": format!("{reference_checksum:016x}"),
            "tolerance": tolerance,
            "kernels": rows.iter().map(|(name, err, stats, sum)| serde_json::json!({
                "format": name,
                "rel_inf_err": err,
                "checksum": format!("{sum:016x}"),
                "stats": stats,
            })).collect::<Vec<_>>(),
            "parallel_checksum": parallel_checksum.map(|c| format!("{c:016x}")),
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
    } else {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "  {:<10} {:>12} {:>10} {:>10} {:>12} {:>18}",
            "format", "rel_err", "useful", "padded", "idle_lanes", "checksum"
        );
        for (name, err, stats, sum) in &rows {
            let _ = writeln!(
                s,
                "  {:<10} {:>12.3e} {:>10} {:>10} {:>12} {:>18}",
                name,
                err,
                stats.useful_fma,
                stats.padded_fma,
                stats.idle_lane_cycles,
                format!("{sum:016x}")
            );
        }
        let _ = writeln!(s, "  csr reference checksum {reference_checksum:016x}");
        if let (Some(c), Some(n)) = (parallel_checksum, chunks) {
            let _ = writeln!(
                s,
                "  parallel ({n} chunks) checksum {c:016x} (match: {})",
                c == reference_checksum
            );
        }
        s
    };
    write_report(output, &text)?;

    for (name, err, _, _) in &rows {
        if *err > tolerance {
            return Err(CliError::Data(Error::InvalidMatrix(format!(
                "{name} kernel exceeded tolerance: {err:.3e}"
            ))));
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_model(
    ratio: Option<f64>,
    b_gpu: f64,
    b_pci: f64,
    alpha: &str,
    n_nzr: Option<f64>,
    n_rows: usize,
    source: &OptionalMatrixSource,
    split: bool,
    pci_residency: f64,
    precision: Precision,
    json: bool,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let alpha = parse_alpha(alpha)?;
    // --ratio pins b_gpu/b_pci while keeping the PCIe figure
    let (b_gpu, b_pci) = match ratio {
        Some(r) => (r * b_pci, b_pci),
        None => (b_gpu, b_pci),
    };
    let ratio = b_gpu / b_pci;

    let upper = threshold_upper(ratio, alpha).map(Some).or_else(|e| match e {
        Error::UnboundedPenalty { .. } => Ok(None),
        other => Err(other),
    })?;
    let lower = threshold_lower(ratio, alpha);

    // full report when matrix statistics are available
    let summary = match (&source.input, &source.generate_spec, n_nzr) {
        (Some(path), _, _) => Some(histogram(&load_matrix_file(path)?)),
        (_, Some(spec), _) => Some(histogram(&generate(&GeneratorSpec::parse(
            spec,
            source.seed,
        )?)?)),
        (None, None, Some(n)) => {
            let len = n.round().max(1.0) as usize;
            Some(spmv_core::matrix::RowLengthHistogram {
                bins: std::collections::BTreeMap::from([(len, n_rows)]),
                min_len: len,
                max_len: len,
                mean_len: n,
            })
        }
        (None, None, None) => None,
    };

    let full = match &summary {
        Some(h) => {
            let mut params = ModelParams::new(b_gpu, b_pci, alpha, h.mean_len, h.n_rows());
            params.precision = precision;
            params.split_kernel = split;
            params.pci_residency = pci_residency;
            Some(report(&params, h)?)
        }
        None => None,
    };

    let text = if json {
        let doc = serde_json::json!({
            "ratio": ratio,
            "n_nzr_upper_50pct": upper,
            "n_nzr_lower_10pct": lower,
            "report": full,
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "  bandwidth ratio B_gpu/B_pci: {ratio:.3}");
        match upper {
            Some(u) => {
                let _ = writeln!(
                    s,
                    "  >=50% PCIe penalty up to n_nzr {:.3} (~{})",
                    u,
                    u.round()
                );
            }
            None => {
                let _ = writeln!(s, "  >=50% PCIe penalty for every n_nzr (ratio <= 1)");
            }
        }
        let _ = writeln!(
            s,
            "  <10% PCIe penalty from n_nzr {:.3} (~{})",
            lower,
            lower.round()
        );
        if let Some(r) = &full {
            s.push_str(&r.render_table());
        }
        s
    };
    write_report(output, &text)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_dist_run(
    source: &MatrixSource,
    ranks: usize,
    mode: &str,
    balance: &str,
    block_format: &str,
    cost: &str,
    trace: Option<&Path>,
    trace_csv: Option<&Path>,
    json: bool,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let m = source.load()?;
    let modes: Vec<Mode> = if mode.eq_ignore_ascii_case("all") {
        Mode::ALL.to_vec()
    } else {
        vec![mode.parse().map_err(CliError::Usage)?]
    };
    let strategy = match balance.to_ascii_lowercase().as_str() {
        "rows" => PartitionStrategy::Rows,
        "nnz" => PartitionStrategy::Nnz,
        other => {
            return Err(CliError::Usage(format!(
                "--balance expects 'rows' or 'nnz', got '{other}'"
            )))
        }
    };
    let block_format: BlockFormat = block_format.parse().map_err(CliError::Usage)?;
    let cost = parse_cost(cost)?;
    let x = seeded_rhs(m.n_cols, source.seed, 0x2545f4914f6cdd1d);

    let (plan, blocks) = partition_with(&m, ranks, strategy)?;
    let schedule = build_halo(&plan, &blocks);
    let reference_checksum = vector_checksum(&spmv_csr(&m, &x)?);
    let split_reference_checksum = vector_checksum(&split_order_reference(&m, &plan, &x));

    let mut runs = Vec::new();
    for &mode in &modes {
        let result = run_mode_with_format(mode, &plan, &blocks, &schedule, &x, block_format)?;
        let (time, timeline) = simulate_cost(mode, &plan, &blocks, &schedule, &cost);
        runs.push((mode, vector_checksum(&result.y), time, timeline));
    }
    let identical = runs.iter().all(|r| r.1 == split_reference_checksum);

    if let Some(path) = trace {
        let (_, _, _, timeline) = runs.last().unwrap();
        std::fs::write(path, timeline_to_chrome_trace(timeline)).map_err(Error::from)?;
    }
    if let Some(path) = trace_csv {
        let (_, _, _, timeline) = runs.last().unwrap();
        std::fs::write(path, timeline_to_csv(timeline)).map_err(Error::from)?;
    }

    let text = if json {
        let doc = serde_json::json!({
            "ranks": ranks,
            "halo_volume": schedule.total_halo_volume(),
            "reference_checksum": format!("{reference_checksum:016x}"),
            "split_reference_checksum": format!("{split_reference_checksum:016x}"),
            "identical": identical,
            "modes": runs.iter().map(|(mode, sum, time, _)| serde_json::json!({
                "mode": mode.to_string(),
                "checksum": format!("{sum:016x}"),
                "simulated_time_s": time,
            })).collect::<Vec<_>>(),
        });
        format!("{}\n", serde_json::to_string_pretty(&doc).unwrap())
    } else {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "  {} ranks, halo volume {} elements",
            ranks,
            schedule.total_halo_volume()
        );
        let _ = writeln!(s, "  {:<22} {:>18} {:>16}", "mode", "checksum", "simulated_s");
        for (mode, sum, time, _) in &runs {
            let _ = writeln!(
                s,
                "  {:<22} {:>18} {:>16.6e}",
                mode.to_string(),
                format!("{sum:016x}"),
                time
            );
        }
        let _ = writeln!(s, "  csr reference          {reference_checksum:016x}");
        let _ = writeln!(s, "  split-order reference  {split_reference_checksum:016x}");
        let _ = writeln!(s, "  results identical: {identical}");
        if trace_csv.is_none() {
            let (_, _, _, timeline) = runs.last().unwrap();
            s.push_str(&timeline_to_csv(timeline));
        }
        s
    };
    write_report(output, &text)?;

    if !identical {
        return Err(CliError::Data(Error::ScheduleMismatch(
            "modes produced different results".into(),
        )));
    }
    Ok(())
}
