//! Pooled spectra and their densities on the analysis grid.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layer_ensemble::MixedMatrixEnsemble;

pub use crate::eigen::{eig_general, eig_symmetric};

/// How a member's eigenvalues become real pooled values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    /// Symmetric solver; eigenvalues are real.
    Symmetric,
    /// General solver; pool |λ|.
    Modulus,
    /// General solver; pool Re λ.
    RealPart,
}

/// Per-member eigenvalue scaling applied before pooling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingMode {
    #[default]
    None,
    /// Divide by the member order N.
    InvN,
    /// Divide by the member's spectral radius.
    UnitRadius,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PooledSpectrum {
    pub values: Vec<f64>,
    pub source_label: String,
}

impl PooledSpectrum {
    pub fn new(values: Vec<f64>, source_label: impl Into<String>) -> Self {
        Self {
            values,
            source_label: source_label.into(),
        }
    }

    pub fn total_count(&self) -> usize {
        self.values.len()
    }
}

/// Equally spaced bins over `[0, eps_max)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub eps_max: f64,
    pub bins: usize,
}

impl Default for SpectralGrid {
    fn default() -> Self {
        Self {
            eps_max: 6.0,
            bins: 1000,
        }
    }
}

impl SpectralGrid {
    pub fn new(eps_max: f64, bins: usize) -> Result<Self> {
        let g = Self { eps_max, bins };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.bins < 2 {
            return Err(Error::InvalidGrid(format!(
                "bins = {} (need at least 2)",
                self.bins
            )));
        }
        if !(self.eps_max.is_finite() && self.eps_max > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "eps_max = {} (need > 0)",
                self.eps_max
            )));
        }
        Ok(())
    }

    pub fn bin_width(&self) -> f64 {
        self.eps_max / self.bins as f64
    }

    /// Left edge of bin `k`.
    pub fn left_edge(&self, k: usize) -> f64 {
        k as f64 * self.bin_width()
    }

    /// Bin holding `eps`, or `None` outside `[0, eps_max)`.
    pub fn bin_of(&self, eps: f64) -> Option<usize> {
        if !(eps >= 0.0 && eps < self.eps_max) {
            return None;
        }
        let k = (eps / self.bin_width()).floor() as usize;
        Some(k.min(self.bins - 1))
    }
}

/// Histogram density normalized by the total pooled count.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityHistogram {
    pub grid: SpectralGrid,
    pub density: Vec<f64>,
    pub in_range_fraction: f64,
}

impl DensityHistogram {
    pub fn mass(&self) -> f64 {
        self.density.iter().sum::<f64>() * self.grid.bin_width()
    }
}

fn scale_factor(eigenvalues: &[Complex64], order: usize, scaling: ScalingMode) -> f64 {
    match scaling {
        ScalingMode::None => 1.0,
        ScalingMode::InvN => 1.0 / order as f64,
        ScalingMode::UnitRadius => {
            let radius = eigenvalues.iter().fold(0.0f64, |m, z| m.max(z.norm()));
            if radius > 0.0 {
                1.0 / radius
            } else {
                1.0
            }
        }
    }
}

/// Reduced, scaled eigenvalues of one member.
pub fn member_spectrum(
    m: &crate::matrix::Matrix,
    reduction: Reduction,
    scaling: ScalingMode,
) -> Result<Vec<f64>> {
    let order = m.rows();
    match reduction {
        Reduction::Symmetric => {
            let ev = eig_symmetric(m)?;
            let as_complex: Vec<Complex64> = ev.iter().map(|&l| Complex64::new(l, 0.0)).collect();
            let f = scale_factor(&as_complex, order, scaling);
            Ok(ev.into_iter().map(|l| l * f).collect())
        }
        Reduction::Modulus | Reduction::RealPart => {
            let ev = eig_general(m)?;
            let f = scale_factor(&ev, order, scaling);
            Ok(ev
                .into_iter()
                .map(|z| {
                    if reduction == Reduction::Modulus {
                        z.norm() * f
                    } else {
                        z.re * f
                    }
                })
                .collect())
        }
    }
}

/// Concatenated eigenvalues of every member, in member order.
pub fn pool_spectrum(
    e: &MixedMatrixEnsemble,
    reduction: Reduction,
    scaling: ScalingMode,
) -> Result<PooledSpectrum> {
    let per_member = e
        .members()
        .par_iter()
        .enumerate()
        .map(|(index, m)| {
            member_spectrum(m, reduction, scaling).map_err(|source| Error::Member {
                index,
                name: e.member_names()[index].clone(),
                order: m.rows(),
                source: Box::new(source),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = per_member.into_iter().flatten().collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite pooled eigenvalue {bad}"
        )));
    }
    Ok(PooledSpectrum::new(values, e.source_label()))
}

/// `ρ_k = #{ε ∈ [k·w, (k+1)·w)} / (total · w)`.
///
/// Values outside `[0, eps_max)` count toward the total but land in no bin.
pub fn spectral_density(s: &PooledSpectrum, g: &SpectralGrid) -> Result<DensityHistogram> {
    g.validate()?;
    let mut counts = vec![0u64; g.bins];
    let mut in_range = 0u64;
    for &v in &s.values {
        if let Some(k) = g.bin_of(v) {
            counts[k] += 1;
            in_range += 1;
        }
    }
    let total = s.total_count();
    let (density, in_range_fraction) = if total == 0 {
        (vec![0.0; g.bins], 0.0)
    } else {
        let norm = 1.0 / (total as f64 * g.bin_width());
        (
            counts.iter().map(|&c| c as f64 * norm).collect(),
            in_range as f64 / total as f64,
        )
    };
    Ok(DensityHistogram {
        grid: *g,
        density,
        in_range_fraction,
    })
}
