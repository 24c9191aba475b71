//! Weight-tensor files and the selection of tensors that enter an ensemble.
//!
//! Files use the safetensors layout: an 8-byte little-endian header length
//! `L`, then `L` bytes of JSON mapping each tensor name to
//! `{"dtype", "shape", "data_offsets"}` (offsets relative to byte `8 + L`),
//! plus an optional `"__metadata__"` string map. Only `F32` and `F64`
//! little-endian payloads are accepted.

use std::collections::{BTreeMap, HashSet};

use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::{Error, ParseError, Result};

pub const METADATA_KEY: &str = "__metadata__";
pub const ARCHITECTURE_KEY: &str = "architecture";
pub const LAYER_ORDER_KEY: &str = "layer_order";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Dtype::F32 => "F32",
            Dtype::F64 => "F64",
        }
    }
}

/// Tensor values in their stored precision.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorData {
    F32(Vec<f32>),
    F64(Vec<f64>),
}

impl TensorData {
    pub fn len(&self) -> usize {
        match self {
            TensorData::F32(v) => v.len(),
            TensorData::F64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dtype(&self) -> Dtype {
        match self {
            TensorData::F32(_) => Dtype::F32,
            TensorData::F64(_) => Dtype::F64,
        }
    }

    pub fn get(&self, i: usize) -> f64 {
        match self {
            TensorData::F32(v) => f64::from(v[i]),
            TensorData::F64(v) => v[i],
        }
    }

    pub fn to_f64_vec(&self) -> Vec<f64> {
        match self {
            TensorData::F32(v) => v.iter().map(|&x| f64::from(x)).collect(),
            TensorData::F64(v) => v.clone(),
        }
    }
}

/// A named n-dimensional real array from one network layer.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTensor {
    name: String,
    shape: Vec<usize>,
    data: TensorData,
}

impl WeightTensor {
    pub fn new(name: impl Into<String>, shape: Vec<usize>, data: TensorData) -> Result<Self> {
        let name = name.into();
        if let Some(pos) = shape.iter().position(|&p| p == 0) {
            return Err(Error::InvalidTensor {
                name,
                reason: format!("dimension {pos} has extent 0"),
            });
        }
        let expected = shape.iter().try_fold(1usize, |acc, &p| acc.checked_mul(p));
        if expected != Some(data.len()) {
            return Err(Error::InvalidTensor {
                name,
                reason: format!("shape {shape:?} does not match {} values", data.len()),
            });
        }
        Ok(Self { name, shape, data })
    }

    pub fn from_f32(name: impl Into<String>, shape: Vec<usize>, data: Vec<f32>) -> Result<Self> {
        Self::new(name, shape, TensorData::F32(data))
    }

    pub fn from_f64(name: impl Into<String>, shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        Self::new(name, shape, TensorData::F64(data))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn data(&self) -> &TensorData {
        &self.data
    }

    /// Leading extent `p₁`, or 1 for a scalar.
    pub fn leading_dim(&self) -> usize {
        self.shape.first().copied().unwrap_or(1)
    }
}

/// Ordered tensors plus string metadata.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WeightCollection {
    tensors: Vec<WeightTensor>,
    metadata: BTreeMap<String, String>,
}

impl WeightCollection {
    pub fn new(tensors: Vec<WeightTensor>, metadata: BTreeMap<String, String>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(tensors.len());
        for t in &tensors {
            if !seen.insert(t.name()) {
                return Err(Error::DuplicateName(t.name().to_string()));
            }
        }
        Ok(Self { tensors, metadata })
    }

    pub fn tensors(&self) -> &[WeightTensor] {
        &self.tensors
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn architecture(&self) -> Option<&str> {
        self.metadata.get(ARCHITECTURE_KEY).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tensors.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&WeightTensor> {
        self.tensors.iter().find(|t| t.name() == name)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    dtype: String,
    shape: Vec<u64>,
    data_offsets: [u64; 2],
}

/// Decodes a complete tensor file.
///
/// Tensors come back in `layer_order` when the metadata carries that key,
/// otherwise in lexicographic name order.
pub fn parse_tensor_file(bytes: &[u8]) -> Result<WeightCollection, ParseError> {
    if bytes.len() < 8 {
        return Err(ParseError::TruncatedHeaderLength(bytes.len()));
    }
    let declared = u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"));
    let header_end = usize::try_from(declared)
        .ok()
        .and_then(|l| l.checked_add(8))
        .filter(|&end| end <= bytes.len())
        .ok_or(ParseError::HeaderLength {
            declared,
            available: bytes.len(),
        })?;
    let header = std::str::from_utf8(&bytes[8..header_end])
        .map_err(|e| ParseError::HeaderEncoding(e.to_string()))?;
    let doc: Map<String, Value> =
        serde_json::from_str(header).map_err(|e| ParseError::HeaderSyntax(e.to_string()))?;
    let payload = &bytes[header_end..];

    let mut metadata: BTreeMap<String, String> = BTreeMap::new();
    let mut entries: Vec<(String, Dtype, Vec<usize>, u64, u64)> = Vec::with_capacity(doc.len());
    for (name, value) in doc {
        if name == METADATA_KEY {
            metadata = serde_json::from_value(value).map_err(|e| ParseError::InvalidEntry {
                name: METADATA_KEY.into(),
                reason: format!("expected a string-to-string map: {e}"),
            })?;
            continue;
        }
        let raw: RawEntry =
            serde_json::from_value(value).map_err(|e| ParseError::InvalidEntry {
                name: name.clone(),
                reason: e.to_string(),
            })?;
        let dtype = match raw.dtype.as_str() {
            "F32" => Dtype::F32,
            "F64" => Dtype::F64,
            _ => {
                return Err(ParseError::UnsupportedDtype {
                    name,
                    dtype: raw.dtype,
                })
            }
        };
        let shape = raw
            .shape
            .iter()
            .map(|&p| usize::try_from(p).ok().filter(|&p| p >= 1))
            .collect::<Option<Vec<usize>>>()
            .ok_or_else(|| ParseError::InvalidEntry {
                name: name.clone(),
                reason: format!("shape {:?} must contain positive extents", raw.shape),
            })?;
        let [begin, end] = raw.data_offsets;
        if begin > end || end > payload.len() as u64 {
            return Err(ParseError::OffsetOutOfBounds {
                name,
                begin,
                end,
                payload: payload.len(),
            });
        }
        let expected = shape
            .iter()
            .try_fold(dtype.size() as u64, |acc, &p| acc.checked_mul(p as u64))
            .ok_or_else(|| ParseError::InvalidEntry {
                name: name.clone(),
                reason: "shape size overflows".into(),
            })?;
        if end - begin != expected {
            return Err(ParseError::SizeMismatch {
                name,
                expected,
                actual: end - begin,
            });
        }
        entries.push((name, dtype, shape, begin, end));
    }

    let mut ranges: Vec<(u64, u64, &str)> = entries
        .iter()
        .filter(|e| e.4 > e.3)
        .map(|e| (e.3, e.4, e.0.as_str()))
        .collect();
    ranges.sort_unstable();
    for pair in ranges.windows(2) {
        if pair[1].0 < pair[0].1 {
            return Err(ParseError::OverlappingOffsets {
                first: pair[0].2.to_string(),
                second: pair[1].2.to_string(),
            });
        }
    }

    entries.sort_by(|a, b| a.0.cmp(&b.0));
    if let Some(spec) = metadata.get(LAYER_ORDER_KEY) {
        let order = parse_layer_order(spec)?;
        let mut rank = BTreeMap::new();
        for (i, name) in order.iter().enumerate() {
            if !entries.iter().any(|e| &e.0 == name) {
                return Err(ParseError::LayerOrder(format!("unknown tensor `{name}`")));
            }
            if rank.insert(name.clone(), i).is_some() {
                return Err(ParseError::LayerOrder(format!(
                    "tensor `{name}` listed twice"
                )));
            }
        }
        // listed tensors first, the rest keep lexicographic order
        entries.sort_by_key(|e| rank.get(&e.0).copied().unwrap_or(usize::MAX));
    }

    let tensors = entries
        .into_iter()
        .map(|(name, dtype, shape, begin, end)| {
            let raw = &payload[begin as usize..end as usize];
            let data = match dtype {
                Dtype::F32 => TensorData::F32(
                    raw.chunks_exact(4)
                        .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
                        .collect(),
                ),
                Dtype::F64 => TensorData::F64(
                    raw.chunks_exact(8)
                        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                        .collect(),
                ),
            };
            WeightTensor { name, shape, data }
        })
        .collect();
    Ok(WeightCollection { tensors, metadata })
}

/// `layer_order` is either a JSON array of names or a comma-separated list.
fn parse_layer_order(spec: &str) -> Result<Vec<String>, ParseError> {
    let trimmed = spec.trim();
    if trimmed.starts_with('[') {
        serde_json::from_str(trimmed).map_err(|e| ParseError::LayerOrder(e.to_string()))
    } else {
        Ok(trimmed
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(String::from)
            .collect())
    }
}

/// Encodes a collection in the same layout `parse_tensor_file` reads.
///
/// Payloads are written in collection order and the header is padded with
/// spaces to an 8-byte boundary.
pub fn encode_tensor_file(collection: &WeightCollection) -> Vec<u8> {
    let mut header = Map::new();
    let mut offset = 0u64;
    for t in collection.tensors() {
        let nbytes = (t.data().len() * t.data().dtype().size()) as u64;
        header.insert(
            t.name().to_string(),
            serde_json::json!({
                "dtype": t.data().dtype().as_str(),
                "shape": t.shape(),
                "data_offsets": [offset, offset + nbytes],
            }),
        );
        offset += nbytes;
    }
    if !collection.metadata().is_empty() {
        header.insert(
            METADATA_KEY.to_string(),
            serde_json::to_value(collection.metadata()).expect("string map serializes"),
        );
    }
    let mut text = serde_json::to_string(&header).expect("header serializes");
    while text.len() % 8 != 0 {
        text.push(' ');
    }

    let mut out = Vec::with_capacity(8 + text.len() + offset as usize);
    out.extend_from_slice(&(text.len() as u64).to_le_bytes());
    out.extend_from_slice(text.as_bytes());
    for t in collection.tensors() {
        match t.data() {
            TensorData::F32(v) => v
                .iter()
                .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
            TensorData::F64(v) => v
                .iter()
                .for_each(|x| out.extend_from_slice(&x.to_le_bytes())),
        }
    }
    out
}

/// Which tensors of a collection become ensemble members.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionPolicy {
    pub min_ndim: usize,
    pub min_order: usize,
    pub name_excludes: Vec<String>,
    pub max_order: Option<usize>,
}

impl Default for SelectionPolicy {
    fn default() -> Self {
        Self {
            min_ndim: 2,
            min_order: 2,
            name_excludes: ["bias", "running_mean", "running_var", "num_batches_tracked"]
                .into_iter()
                .map(String::from)
                .collect(),
            max_order: None,
        }
    }
}

impl SelectionPolicy {
    pub fn with_max_order(mut self, max_order: Option<usize>) -> Self {
        self.max_order = max_order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_ndim < 2 {
            return Err(Error::InvalidArgument(format!(
                "min_ndim {} < 2",
                self.min_ndim
            )));
        }
        if self.min_order < 2 {
            return Err(Error::InvalidArgument(format!(
                "min_order {} < 2",
                self.min_order
            )));
        }
        Ok(())
    }

    pub fn accepts(&self, t: &WeightTensor) -> bool {
        t.ndim() >= self.min_ndim
            && t.leading_dim() >= self.min_order
            && self.max_order.map_or(true, |cap| t.leading_dim() <= cap)
            && !self
                .name_excludes
                .iter()
                .any(|ex| t.name().contains(ex.as_str()))
    }
}

/// Tensors that pass `policy`, in collection order.
pub fn select_weight_tensors<'a>(
    collection: &'a WeightCollection,
    policy: &SelectionPolicy,
) -> Vec<&'a WeightTensor> {
    collection
        .tensors()
        .iter()
        .filter(|t| policy.accepts(t))
        .collect()
}
