//! End-to-end analysis: weights → layer ensemble and its conjugate circular
//! ensemble → pooled spectra → densities → CSD report.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circular_ensemble::build_conjugate_ensemble;
use crate::equivalence::{
    csd_labeled, CsdReport, DEFAULT_DELTA, DEFAULT_TAIL_FRACTION, DEFAULT_TAIL_TOL,
};
use crate::error::{Error, Result};
use crate::layer_ensemble::build_layer_ensemble;
use crate::spectra::{
    pool_spectrum, spectral_density, DensityHistogram, Reduction, ScalingMode, SpectralGrid,
};
use crate::tensor_ingest::{
    parse_tensor_file, select_weight_tensors, SelectionPolicy, WeightCollection,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const CURVE_HEADER: &str = "epsilon,rho_layer,rho_cue,delta,cumulative";

/// Every knob of one analysis run. Serialized verbatim into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub weights: Option<String>,
    pub seed: u64,
    pub eps_max: f64,
    pub bins: usize,
    pub scaling: ScalingMode,
    /// Reduction applied to the circular ensemble members; layer members are
    /// always symmetric.
    pub reduction: Reduction,
    pub reps: usize,
    pub max_order: Option<usize>,
    pub min_order: usize,
    pub name_excludes: Vec<String>,
    pub tail_fraction: f64,
    pub tail_tol: f64,
    pub delta_threshold: f64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        let policy = SelectionPolicy::default();
        let grid = SpectralGrid::default();
        Self {
            weights: None,
            seed: 0,
            eps_max: grid.eps_max,
            bins: grid.bins,
            scaling: ScalingMode::None,
            reduction: Reduction::Modulus,
            reps: 1,
            max_order: None,
            min_order: policy.min_order,
            name_excludes: policy.name_excludes,
            tail_fraction: DEFAULT_TAIL_FRACTION,
            tail_tol: DEFAULT_TAIL_TOL,
            delta_threshold: DEFAULT_DELTA,
        }
    }
}

impl AnalysisConfig {
    pub fn grid(&self) -> Result<SpectralGrid> {
        SpectralGrid::new(self.eps_max, self.bins)
    }

    pub fn policy(&self) -> SelectionPolicy {
        SelectionPolicy {
            min_ndim: 2,
            min_order: self.min_order,
            name_excludes: self.name_excludes.clone(),
            max_order: self.max_order,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        self.policy().validate()?;
        if self.reduction == Reduction::Symmetric {
            return Err(Error::InvalidArgument(
                "circular ensemble members are not symmetric; use modulus or real-part".into(),
            ));
        }
        if self.reps == 0 {
            return Err(Error::InvalidArgument("reps must be at least 1".into()));
        }
        if !(self.tail_fraction > 0.0 && self.tail_fraction <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "tail_fraction {} outside (0, 1]",
                self.tail_fraction
            )));
        }
        if !(self.tail_tol >= 0.0 && self.delta_threshold >= 0.0) {
            return Err(Error::InvalidArgument(
                "tolerances must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub m: usize,
    pub orders: Vec<usize>,
    pub members: Vec<String>,
    pub pooled_count: usize,
    pub in_range_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CueSummary {
    pub seed: u64,
    pub reps: usize,
    pub m: usize,
    pub pooled_count: usize,
    pub in_range_fraction: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsdSummary {
    pub variance: f64,
    pub cumulative_final: f64,
    pub conjugate: bool,
    pub tail_fraction: f64,
    pub tail_tol: f64,
}

/// The report document written by `csd analyze` and read by `csd compare`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub architecture: Option<String>,
    pub config: AnalysisConfig,
    pub ensemble: EnsembleSummary,
    pub cue: CueSummary,
    pub csd: CsdSummary,
}

impl Report {
    pub fn grid(&self) -> SpectralGrid {
        SpectralGrid {
            eps_max: self.config.eps_max,
            bins: self.config.bins,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidArgument(format!("bad report: {e}")))
    }
}

#[derive(Debug, Clone)]
pub struct AnalysisOutcome {
    pub report: Report,
    pub layer_density: DensityHistogram,
    pub cue_density: DensityHistogram,
    pub csd: CsdReport,
}

impl AnalysisOutcome {
    /// Plot-ready table: header plus one row per bin, epsilon at the left edge.
    pub fn curve_csv(&self) -> String {
        let grid = self.csd.curve.grid;
        let mut out = String::with_capacity(64 * (grid.bins + 1));
        out.push_str(CURVE_HEADER);
        out.push('\n');
        for k in 0..grid.bins {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                grid.left_edge(k),
                self.layer_density.density[k],
                self.cue_density.density[k],
                self.csd.curve.delta[k],
                self.csd.cumulative[k],
            );
        }
        out
    }
}

pub fn analyze_bytes(bytes: &[u8], config: &AnalysisConfig) -> Result<AnalysisOutcome> {
    let collection = parse_tensor_file(bytes)?;
    analyze_collection(&collection, config)
}

pub fn analyze_collection(
    collection: &WeightCollection,
    config: &AnalysisConfig,
) -> Result<AnalysisOutcome> {
    config.validate()?;
    let grid = config.grid()?;
    let label = collection.architecture().unwrap_or("network").to_string();

    let selected = select_weight_tensors(collection, &config.policy());
    if selected.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let layers = build_layer_ensemble(&selected, &label)?;
    let orders = layers.orders();
    let cue = build_conjugate_ensemble(&orders, config.seed, config.reps)?;

    let layer_spectrum = pool_spectrum(&layers, Reduction::Symmetric, config.scaling)?;
    let cue_spectrum = pool_spectrum(&cue, config.reduction, config.scaling)?;
    let layer_density = spectral_density(&layer_spectrum, &grid)?;
    let cue_density = spectral_density(&cue_spectrum, &grid)?;

    let curve = csd_labeled(&layer_density, &cue_density, (&label, cue.source_label()))?;
    let csd = CsdReport::new(curve, config.tail_fraction, config.tail_tol)?;

    let report = Report {
        tool_version: TOOL_VERSION.to_string(),
        architecture: collection.architecture().map(String::from),
        config: config.clone(),
        ensemble: EnsembleSummary {
            m: layers.len(),
            orders,
            members: layers.member_names().to_vec(),
            pooled_count: layer_spectrum.total_count(),
            in_range_fraction: layer_density.in_range_fraction,
        },
        cue: CueSummary {
            seed: config.seed,
            reps: config.reps,
            m: cue.len(),
            pooled_count: cue_spectrum.total_count(),
            in_range_fraction: cue_density.in_range_fraction,
        },
        csd: CsdSummary {
            variance: csd.variance,
            cumulative_final: csd.cumulative_final(),
            conjugate: csd.conjugate,
            tail_fraction: csd.tail_fraction,
            tail_tol: csd.tail_tol,
        },
    };
    Ok(AnalysisOutcome {
        report,
        layer_density,
        cue_density,
        csd,
    })
}
