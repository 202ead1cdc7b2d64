//! Byte-counting performance model: code balance, device/PCIe time
//! decomposition, and the favorable row-count thresholds.
//!
//! All formulas count worst-case memory traffic per floating-point
//! operation. The RHS cache-reuse parameter `alpha` runs from `1/n_nzr`
//! (each RHS element loaded once) to 1 (every access goes to memory); the
//! column-offset array is assumed to always come from cache and is not
//! counted in either precision.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::RowLengthHistogram;
use crate::Precision;

/// RHS cache-reuse assumption.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum AlphaMode {
    /// Fixed reuse factor in (0, 1].
    Fixed(f64),
    /// Perfect reuse, `alpha = 1 / n_nzr`.
    Reciprocal,
}

impl AlphaMode {
    pub fn effective(&self, n_nzr: f64) -> f64 {
        match self {
            AlphaMode::Fixed(a) => *a,
            AlphaMode::Reciprocal => 1.0 / n_nzr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelParams {
    /// Device memory bandwidth, bytes/s.
    pub b_gpu: f64,
    /// Host-device link bandwidth, bytes/s.
    pub b_pci: f64,
    pub alpha: AlphaMode,
    /// Average non-zeros per row.
    pub n_nzr: f64,
    pub n_rows: usize,
    pub precision: Precision,
    /// Account for the split local/nonlocal kernel, which writes the result
    /// vector twice.
    pub split_kernel: bool,
    /// Fraction of the RHS/LHS vectors that actually crosses the PCIe bus
    /// per spMVM (1.0 = full transfer both ways).
    pub pci_residency: f64,
}

impl ModelParams {
    pub fn new(b_gpu: f64, b_pci: f64, alpha: AlphaMode, n_nzr: f64, n_rows: usize) -> Self {
        ModelParams {
            b_gpu,
            b_pci,
            alpha,
            n_nzr,
            n_rows,
            precision: Precision::Dp,
            split_kernel: false,
            pci_residency: 1.0,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.b_gpu / self.b_pci
    }

    pub fn validate(&self) -> Result<()> {
        if self.b_gpu.is_nan() || self.b_gpu <= 0.0 || self.b_pci.is_nan() || self.b_pci <= 0.0 {
            return Err(Error::InvalidParams("bandwidths must be positive".into()));
        }
        if self.n_nzr.is_nan() || self.n_nzr < 1.0 {
            return Err(Error::InvalidParams(format!(
                "n_nzr must be at least 1, got {}",
                self.n_nzr
            )));
        }
        if let AlphaMode::Fixed(a) = self.alpha {
            if !(a > 0.0 && a <= 1.0) {
                return Err(Error::InvalidParams(format!(
                    "alpha must lie in (0, 1], got {a}"
                )));
            }
        }
        if !(0.0..=1.0).contains(&self.pci_residency) {
            return Err(Error::InvalidParams(format!(
                "pci_residency must lie in [0, 1], got {}",
                self.pci_residency
            )));
        }
        Ok(())
    }
}

/// Worst-case code balance in bytes/flop.
///
/// DP: `6 + 4*alpha + 8/n_nzr`; SP halves the value and vector terms but
/// keeps 4-byte indices: `4 + 2*alpha + 4/n_nzr`. The split kernel adds one
/// extra result-vector write pass: `8/n_nzr` (DP) or `4/n_nzr` (SP).
pub fn code_balance(p: &ModelParams) -> f64 {
    let a = p.alpha.effective(p.n_nzr);
    let mut balance = match p.precision {
        Precision::Dp => 6.0 + 4.0 * a + 8.0 / p.n_nzr,
        Precision::Sp => 4.0 + 2.0 * a + 4.0 / p.n_nzr,
    };
    if p.split_kernel {
        balance += match p.precision {
            Precision::Dp => 8.0 / p.n_nzr,
            Precision::Sp => 4.0 / p.n_nzr,
        };
    }
    balance
}

/// Expected wallclock times (seconds) for the spMVM on the device and for
/// the RHS/LHS transfer over the PCIe bus.
///
/// DP: `t_mvm = (8 N / B_gpu) [n_nzr (alpha + 3/2) + 2]`,
/// `t_pci = 16 N / B_pci` scaled by `pci_residency`. A split kernel writes
/// the result twice, doubling the per-row vector term, which keeps `t_mvm`
/// consistent with [`code_balance`]: `2 N n_nzr / t_mvm == B_gpu / balance`
/// holds exactly either way.
pub fn times(p: &ModelParams) -> (f64, f64) {
    let n = p.n_rows as f64;
    let a = p.alpha.effective(p.n_nzr);
    let vector_term = if p.split_kernel { 4.0 } else { 2.0 };
    let (t_mvm, t_pci) = match p.precision {
        Precision::Dp => (
            8.0 * n / p.b_gpu * (p.n_nzr * (a + 1.5) + vector_term),
            16.0 * n / p.b_pci,
        ),
        Precision::Sp => (
            4.0 * n / p.b_gpu * (p.n_nzr * (a + 2.0) + vector_term),
            8.0 * n / p.b_pci,
        ),
    };
    (t_mvm, t_pci * p.pci_residency)
}

/// Largest n_nzr that still suffers at least a 50% PCIe penalty
/// (`t_mvm <= t_pci`). Matrices at or below this bound gain little from
/// device acceleration.
///
/// Fixed alpha: `2 (ratio - 1) / (alpha + 3/2)`; reciprocal alpha solves
/// `n (1/n + 3/2) + 2 <= 2 ratio` exactly: `(2 (ratio - 1) - 1) / 1.5`.
pub fn threshold_upper(ratio: f64, alpha: AlphaMode) -> Result<f64> {
    if ratio <= 1.0 {
        return Err(Error::UnboundedPenalty { ratio });
    }
    let bound = match alpha {
        AlphaMode::Fixed(a) => 2.0 * (ratio - 1.0) / (a + 1.5),
        AlphaMode::Reciprocal => (2.0 * (ratio - 1.0) - 1.0) / 1.5,
    };
    Ok(bound.max(0.0))
}

/// Smallest n_nzr with less than a 10% PCIe penalty (`t_mvm >= 10 t_pci`),
/// clamped to 1.
///
/// Fixed alpha: `(20 ratio - 2) / (alpha + 3/2)`; reciprocal:
/// `(20 ratio - 3) / 1.5`.
pub fn threshold_lower(ratio: f64, alpha: AlphaMode) -> f64 {
    let bound = match alpha {
        AlphaMode::Fixed(a) => (20.0 * ratio - 2.0) / (a + 1.5),
        AlphaMode::Reciprocal => (20.0 * ratio - 3.0) / 1.5,
    };
    bound.max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Favorable,
    Marginal,
    Unfavorable,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Favorable => write!(f, "favorable"),
            Verdict::Marginal => write!(f, "marginal"),
            Verdict::Unfavorable => write!(f, "unfavorable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub balance: f64,
    pub t_mvm: f64,
    pub t_pci: f64,
    pub pci_penalty_fraction: f64,
    pub n_nzr_upper_50pct: f64,
    pub n_nzr_lower_10pct: f64,
    pub predicted_flops: f64,
    pub n_nzr: f64,
    pub verdict: Verdict,
}

impl ModelReport {
    pub fn to_kv(&self) -> String {
        format!(
            "balance={}\nt_mvm={}\nt_pci={}\npci_penalty_fraction={}\nn_nzr_upper_50pct={}\nn_nzr_lower_10pct={}\npredicted_flops={}\nn_nzr={}\nverdict={}\n",
            self.balance,
            self.t_mvm,
            self.t_pci,
            self.pci_penalty_fraction,
            self.n_nzr_upper_50pct,
            self.n_nzr_lower_10pct,
            self.predicted_flops,
            self.n_nzr,
            self.verdict
        )
    }

    /// Aligned plain-text table.
    pub fn render_table(&self) -> String {
        let mut s = String::new();
        let mut row = |k: &str, v: String| s.push_str(&format!("  {k:<24} {v}\n"));
        row("code balance [B/flop]", format!("{:.4}", self.balance));
        row("t_mvm [s]", format!("{:.6e}", self.t_mvm));
        row("t_pci [s]", format!("{:.6e}", self.t_pci));
        row(
            "pci penalty",
            format!("{:.2}%", 100.0 * self.pci_penalty_fraction),
        );
        row(
            "n_nzr <= (50% penalty)",
            format!("{:.3} (~{})", self.n_nzr_upper_50pct, self.n_nzr_upper_50pct.round()),
        );
        row(
            "n_nzr >= (10% penalty)",
            format!("{:.3} (~{})", self.n_nzr_lower_10pct, self.n_nzr_lower_10pct.round()),
        );
        row("predicted [flop/s]", format!("{:.4e}", self.predicted_flops));
        row("n_nzr", format!("{:.3}", self.n_nzr));
        row("verdict", self.verdict.to_string());
        s
    }
}

/// Evaluate the model for a concrete matrix: `n_nzr` is taken from the
/// histogram's mean row length.
pub fn report(p: &ModelParams, summary: &RowLengthHistogram) -> Result<ModelReport> {
    let mut p = p.clone();
    p.n_nzr = summary.mean_len;
    p.validate()?;
    if let AlphaMode::Fixed(a) = p.alpha {
        if summary.max_len > 0 && a < 1.0 / summary.max_len as f64 {
            return Err(Error::InvalidParams(format!(
                "alpha {a} below the perfect-reuse floor 1/{}",
                summary.max_len
            )));
        }
    }
    let ratio = p.ratio();
    let balance = code_balance(&p);
    let (t_mvm, t_pci) = times(&p);
    let upper = match threshold_upper(ratio, p.alpha) {
        Ok(b) => b,
        Err(Error::UnboundedPenalty { .. }) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let lower = threshold_lower(ratio, p.alpha);
    let verdict = if p.n_nzr <= upper {
        Verdict::Unfavorable
    } else if p.n_nzr >= lower {
        Verdict::Favorable
    } else {
        Verdict::Marginal
    };
    Ok(ModelReport {
        balance,
        t_mvm,
        t_pci,
        pci_penalty_fraction: t_pci / (t_mvm + t_pci),
        n_nzr_upper_50pct: upper,
        n_nzr_lower_10pct: lower,
        predicted_flops: 2.0 * p.n_rows as f64 * p.n_nzr / t_mvm,
        n_nzr: p.n_nzr,
        verdict,
    })
}
