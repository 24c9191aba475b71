//! Circular spectral difference (CSD), conjugacy and equivalence verdicts.
//!
//! `Δ(ε) = ρ₁(ε) − ρ₂(ε)` on the shared grid. Two ensembles are conjugate
//! when the running integral of `Δ` stops changing over the upper part of
//! the grid and `Δ` itself is small there. Two ensembles that are both
//! conjugate to circular ensembles are equivalent when the variances of
//! their CSD curves differ by at most `δ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectra::{DensityHistogram, SpectralGrid};

pub const DEFAULT_TAIL_FRACTION: f64 = 0.5;
pub const DEFAULT_TAIL_TOL: f64 = 0.05;
pub const DEFAULT_DELTA: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct CsdCurve {
    pub grid: SpectralGrid,
    pub delta: Vec<f64>,
    pub labels: (String, String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsdReport {
    pub curve: CsdCurve,
    pub cumulative: Vec<f64>,
    pub variance: f64,
    pub conjugate: bool,
    pub tail_fraction: f64,
    pub tail_tol: f64,
}

impl CsdReport {
    pub fn new(curve: CsdCurve, tail_fraction: f64, tail_tol: f64) -> Result<Self> {
        if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail_fraction {tail_fraction} outside (0, 1]"
            )));
        }
        let cumulative = cumulative_csd(&curve);
        let variance = csd_variance(&curve);
        let conjugate = conjugacy_holds(&curve.delta, &cumulative, tail_fraction, tail_tol);
        Ok(Self {
            curve,
            cumulative,
            variance,
            conjugate,
            tail_fraction,
            tail_tol,
        })
    }

    pub fn cumulative_final(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceVerdict {
    pub var_a: f64,
    pub var_b: f64,
    pub delta_threshold: f64,
    pub equivalent: bool,
    pub conjugate_a: bool,
    pub conjugate_b: bool,
}

impl EquivalenceVerdict {
    /// Verdict from already-computed variances and conjugacy flags.
    pub fn from_summaries(
        var_a: f64,
        conjugate_a: bool,
        var_b: f64,
        conjugate_b: bool,
        delta_threshold: f64,
    ) -> Self {
        let equivalent = conjugate_a && conjugate_b && (var_a - var_b).abs() <= delta_threshold;
        Self {
            var_a,
            var_b,
            delta_threshold,
            equivalent,
            conjugate_a,
            conjugate_b,
        }
    }
}

fn check_grids(a: &SpectralGrid, b: &SpectralGrid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!(
            "[0, {}) x {} vs [0, {}) x {}",
            a.eps_max, a.bins, b.eps_max, b.bins
        )));
    }
    Ok(())
}

/// Pointwise `ρ₁ − ρ₂`.
pub fn csd(r1: &DensityHistogram, r2: &DensityHistogram) -> Result<CsdCurve> {
    csd_labeled(r1, r2, ("first", "second"))
}

pub fn csd_labeled(
    r1: &DensityHistogram,
    r2: &DensityHistogram,
    labels: (&str, &str),
) -> Result<CsdCurve> {
    check_grids(&r1.grid, &r2.grid)?;
    let delta = r1
        .density
        .iter()
        .zip(&r2.density)
        .map(|(a, b)| a - b)
        .collect();
    Ok(CsdCurve {
        grid: r1.grid,
        delta,
        labels: (labels.0.into(), labels.1.into()),
    })
}

/// Running integral of `Δ`: `cumulative[k] = Σ_{i≤k} Δ_i · w`.
pub fn cumulative_csd(c: &CsdCurve) -> Vec<f64> {
    let w = c.grid.bin_width();
    c.delta
        .iter()
        .scan(0.0, |acc, d| {
            *acc += d * w;
            Some(*acc)
        })
        .collect()
}

/// Population variance of `Δ` over the grid points.
pub fn csd_variance(c: &CsdCurve) -> f64 {
    let k = c.delta.len();
    if k == 0 {
        return 0.0;
    }
    let mean = c.delta.iter().sum::<f64>() / k as f64;
    c.delta.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / k as f64
}

/// First index of the tail window, `⌈(1 − tail_fraction)·K⌉`.
pub fn tail_start(bins: usize, tail_fraction: f64) -> usize {
    let raw = (1.0 - tail_fraction) * bins as f64;
    // absorb representation error such as (1 - 0.7) * 1000 = 300.00000000000006
    let k0 = (raw - 1e-9 * bins as f64).ceil().max(0.0) as usize;
    k0.min(bins.saturating_sub(1))
}

fn conjugacy_holds(delta: &[f64], cumulative: &[f64], tail_fraction: f64, tol: f64) -> bool {
    let k = delta.len();
    if k == 0 {
        return true;
    }
    let k0 = tail_start(k, tail_fraction);
    let drift = (cumulative[k - 1] - cumulative[k0]).abs();
    let peak = delta[k0..].iter().fold(0.0f64, |m, d| m.max(d.abs()));
    drift <= tol && peak <= 10.0 * tol
}

/// Conjugacy over the tail window: the running integral changes by at most
/// `tol` and `|Δ| ≤ 10·tol` everywhere in the window.
pub fn check_conjugacy(report: &CsdReport, tail_fraction: f64, tol: f64) -> Result<bool> {
    if !(tail_fraction > 0.0 && tail_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "tail_fraction {tail_fraction} outside (0, 1]"
        )));
    }
    Ok(conjugacy_holds(
        &report.curve.delta,
        &report.cumulative,
        tail_fraction,
        tol,
    ))
}

/// Pairwise equivalence from two CSD reports.
pub fn check_equivalence(
    a: &CsdReport,
    b: &CsdReport,
    delta_threshold: f64,
) -> Result<EquivalenceVerdict> {
    check_grids(&a.curve.grid, &b.curve.grid)?;
    Ok(EquivalenceVerdict::from_summaries(
        a.variance,
        a.conjugate,
        b.variance,
        b.conjugate,
        delta_threshold,
    ))
}
