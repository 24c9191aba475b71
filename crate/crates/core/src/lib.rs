//! Conjugate circular ensembles for neural-network weight spectra.
//!
//! The pipeline turns the weight tensors of a trained network into a mixed
//! ensemble of Gram matrices, samples an order-matched ensemble of
//! elementwise-modulus circular unitary matrices, pools the eigenvalues of
//! both, and compares their spectral densities on a fixed grid. The signed
//! density difference (the circular spectral difference, CSD), its running
//! integral and its variance decide whether two ensembles are conjugate and
//! whether two networks are equivalent.
//!
//! ```no_run
//! use csd_core::{analysis::{analyze_bytes, AnalysisConfig}};
//!
//! let bytes = std::fs::read("vgg11.safetensors")?;
//! let outcome = analyze_bytes(&bytes, &AnalysisConfig::default())?;
//! println!("Var(CSD) = {}", outcome.report.csd.variance);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod analysis;
pub mod circular_ensemble;
pub mod eigen;
pub mod equivalence;
pub mod error;
pub mod layer_ensemble;
pub mod matrix;
pub mod rng;
pub mod selftest;
pub mod spectra;
pub mod synthetic;
pub mod tensor_ingest;

pub use error::{Error, ParseError, Result};
pub use matrix::{ComplexMatrix, Matrix};

pub use circular_ensemble::{build_conjugate_ensemble, sample_cue_unitary, sample_gue_hermitian};
pub use equivalence::{
    check_conjugacy, check_equivalence, csd, csd_variance, cumulative_csd, CsdCurve, CsdReport,
    EquivalenceVerdict,
};
pub use layer_ensemble::{build_layer_ensemble, gram_square, stack_tensor, MixedMatrixEnsemble};
pub use rng::RngState;
pub use spectra::{
    pool_spectrum, spectral_density, DensityHistogram, PooledSpectrum, Reduction, ScalingMode,
    SpectralGrid,
};
pub use tensor_ingest::{
    encode_tensor_file, parse_tensor_file, select_weight_tensors, SelectionPolicy,
    WeightCollection, WeightTensor,
};
