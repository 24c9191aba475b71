//! Seeded Gaussian networks for tests, benchmarks and self-checks.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::rng::{RngState, SYNTHETIC_DOMAIN};
use crate::tensor_ingest::{WeightCollection, WeightTensor, ARCHITECTURE_KEY, LAYER_ORDER_KEY};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightScale {
    /// Standard normal entries.
    Unit,
    /// Entries with variance `1 / fan_in`, `fan_in = ∏_{j≥2} pⱼ`.
    FanIn,
}

/// Ten conv/fc layers with leading extents between 16 and 128.
pub const MIXED_TOPOLOGY: &[&[usize]] = &[
    &[16, 3, 3, 3],
    &[32, 16, 3, 3],
    &[32, 32, 3, 3],
    &[64, 32, 3, 3],
    &[64, 64, 3, 3],
    &[128, 64, 3, 3],
    &[128, 128, 3, 3],
    &[128, 128, 3, 3],
    &[128, 2048],
    &[16, 128],
];

/// One f32 tensor per shape, named `layers.{i}.weight`, with a
/// `layer_order` metadata key listing them in order.
pub fn gaussian_network(
    shapes: &[&[usize]],
    seed: u64,
    scale: WeightScale,
    architecture: &str,
) -> Result<WeightCollection> {
    let mut tensors = Vec::with_capacity(shapes.len());
    for (i, shape) in shapes.iter().enumerate() {
        let n: usize = shape.iter().product();
        let fan_in: usize = shape.iter().skip(1).product();
        let std = match scale {
            WeightScale::Unit => 1.0,
            WeightScale::FanIn => 1.0 / (fan_in.max(1) as f64).sqrt(),
        };
        let mut stream = RngState::new(seed, SYNTHETIC_DOMAIN | i as u64).stream();
        let data: Vec<f32> = (0..n).map(|_| (std * stream.normal()) as f32).collect();
        tensors.push(WeightTensor::from_f32(
            format!("layers.{i}.weight"),
            shape.to_vec(),
            data,
        )?);
    }
    let names: Vec<&str> = tensors.iter().map(|t| t.name()).collect();
    let mut metadata = BTreeMap::new();
    metadata.insert(ARCHITECTURE_KEY.to_string(), architecture.to_string());
    metadata.insert(
        LAYER_ORDER_KEY.to_string(),
        serde_json::to_string(&names).expect("names serialize"),
    );
    WeightCollection::new(tensors, metadata)
}

/// Tensor names and shapes of torchvision's vgg11 (weights and biases), with
/// every channel count divided by `width_divisor`.
pub fn vgg11_layout(width_divisor: usize) -> Vec<(String, Vec<usize>)> {
    let d = width_divisor.max(1);
    let convs = [
        (0, 64, 3),
        (3, 128, 64),
        (6, 256, 128),
        (8, 256, 256),
        (11, 512, 256),
        (13, 512, 512),
        (16, 512, 512),
        (18, 512, 512),
    ];
    let mut out = Vec::new();
    for (idx, cout, cin) in convs {
        let cin = if cin == 3 { 3 } else { cin / d };
        out.push((format!("features.{idx}.weight"), vec![cout / d, cin, 3, 3]));
        out.push((format!("features.{idx}.bias"), vec![cout / d]));
    }
    let fcs = [(0, 4096, 512 * 7 * 7), (3, 4096, 4096), (6, 1000, 4096)];
    for (idx, fout, fin) in fcs {
        let fout = if fout == 1000 { 1000 / d } else { fout / d };
        out.push((format!("classifier.{idx}.weight"), vec![fout, fin / d]));
        out.push((format!("classifier.{idx}.bias"), vec![fout]));
    }
    out
}

/// A vgg11-shaped collection filled with fan-in scaled Gaussian values.
pub fn vgg11_like(width_divisor: usize, seed: u64) -> Result<WeightCollection> {
    let layout = vgg11_layout(width_divisor);
    let shapes: Vec<&[usize]> = layout.iter().map(|(_, s)| s.as_slice()).collect();
    let generic = gaussian_network(&shapes, seed, WeightScale::FanIn, "vgg11")?;
    let tensors = generic
        .tensors()
        .iter()
        .zip(&layout)
        .map(|(t, (name, shape))| WeightTensor::new(name.clone(), shape.clone(), t.data().clone()))
        .collect::<Result<Vec<_>>>()?;
    let mut metadata = BTreeMap::new();
    metadata.insert(ARCHITECTURE_KEY.to_string(), "vgg11".to_string());
    let names: Vec<&str> = layout.iter().map(|(n, _)| n.as_str()).collect();
    metadata.insert(
        LAYER_ORDER_KEY.to_string(),
        serde_json::to_string(&names).expect("names serialize"),
    );
    WeightCollection::new(tensors, metadata)
}
