//! Layer matrix ensembles: each selected weight tensor `W` of shape
//! `(p₁, …, pₙ)` is viewed as a `p₁ × ∏ pⱼ` matrix `A` and replaced by its
//! Gram matrix `X = A Aᵀ`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::tensor_ingest::{TensorData, WeightTensor};

/// Row-major view of a weight tensor as an `rows × cols` matrix.
///
/// Stacking is a reshape of the stored data, so the view borrows it.
#[derive(Debug, Clone, Copy)]
pub struct RectMatrix<'a> {
    rows: usize,
    cols: usize,
    values: &'a TensorData,
}

impl<'a> RectMatrix<'a> {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values.get(i * self.cols + j)
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        (0..self.cols).map(|j| self.get(i, j)).collect()
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(self.rows, self.cols, self.values.to_f64_vec())
    }
}

/// Reshapes `w` into `p₁ × ∏_{j≥2} pⱼ`; row `i` is the row-major flattening of `w[i, …]`.
pub fn stack_tensor(w: &WeightTensor) -> Result<RectMatrix<'_>> {
    if w.ndim() < 2 {
        return Err(Error::TooFewDims {
            name: w.name().to_string(),
            ndim: w.ndim(),
        });
    }
    let rows = w.shape()[0];
    let cols = w.shape()[1..].iter().product();
    Ok(RectMatrix {
        rows,
        cols,
        values: w.data(),
    })
}

/// Four-lane dot product; fixed association order keeps results reproducible.
#[inline]
fn dot<T: Copy + Into<f64>>(a: &[T], b: &[T]) -> f64 {
    let mut acc = [0.0f64; 4];
    let chunks_a = a.chunks_exact(4);
    let chunks_b = b.chunks_exact(4);
    let (rest_a, rest_b) = (chunks_a.remainder(), chunks_b.remainder());
    for (x, y) in chunks_a.zip(chunks_b) {
        for l in 0..4 {
            acc[l] += x[l].into() * y[l].into();
        }
    }
    let mut tail = 0.0;
    for (x, y) in rest_a.iter().zip(rest_b) {
        tail += (*x).into() * (*y).into();
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn gram_rows<T: Copy + Into<f64> + Sync>(data: &[T], rows: usize, cols: usize) -> Matrix {
    let upper: Vec<Vec<f64>> = (0..rows)
        .into_par_iter()
        .map(|i| {
            let ri = &data[i * cols..(i + 1) * cols];
            (i..rows)
                .map(|j| dot(ri, &data[j * cols..(j + 1) * cols]))
                .collect()
        })
        .collect();
    let mut x = Matrix::zeros(rows, rows);
    for (i, row) in upper.into_iter().enumerate() {
        for (offset, v) in row.into_iter().enumerate() {
            let j = i + offset;
            x[(i, j)] = v;
            x[(j, i)] = v;
        }
    }
    x
}

/// `X = A Aᵀ`, computed on the upper triangle and mirrored so `X` is exactly symmetric.
pub fn gram_square(a: &RectMatrix<'_>) -> Matrix {
    match a.values {
        TensorData::F32(v) => gram_rows(v, a.rows, a.cols),
        TensorData::F64(v) => gram_rows(v, a.rows, a.cols),
    }
}

/// Gram matrix of a dense real matrix.
pub fn gram_of_matrix(a: &Matrix) -> Matrix {
    gram_rows(a.as_slice(), a.rows(), a.cols())
}

/// An ordered set of real square matrices of possibly different orders.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedMatrixEnsemble {
    members: Vec<Matrix>,
    names: Vec<String>,
    source_label: String,
}

impl MixedMatrixEnsemble {
    /// Every member must be square with order ≥ 2.
    pub fn new(members: Vec<Matrix>, source_label: impl Into<String>) -> Result<Self> {
        let names = (0..members.len()).map(|i| format!("member{i}")).collect();
        Self::with_names(members, names, source_label)
    }

    pub fn with_names(
        members: Vec<Matrix>,
        names: Vec<String>,
        source_label: impl Into<String>,
    ) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyEnsemble);
        }
        assert_eq!(members.len(), names.len(), "one name per member");
        for m in &members {
            if !m.is_square() {
                return Err(Error::InvalidArgument(format!(
                    "ensemble member is {}x{}, not square",
                    m.rows(),
                    m.cols()
                )));
            }
            if m.rows() < 2 {
                return Err(Error::OrderTooSmall(m.rows()));
            }
        }
        Ok(Self {
            members,
            names,
            source_label: source_label.into(),
        })
    }

    pub fn members(&self) -> &[Matrix] {
        &self.members
    }

    /// Name of the tensor (or sample) each member came from.
    pub fn member_names(&self) -> &[String] {
        &self.names
    }

    pub fn orders(&self) -> Vec<usize> {
        self.members.iter().map(Matrix::rows).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn total_order(&self) -> usize {
        self.members.iter().map(Matrix::rows).sum()
    }
}

/// One Gram matrix per tensor, in input order.
pub fn build_layer_ensemble(tensors: &[&WeightTensor], label: &str) -> Result<MixedMatrixEnsemble> {
    if tensors.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    let members = tensors
        .iter()
        .map(|w| stack_tensor(w).map(|a| gram_square(&a)))
        .collect::<Result<Vec<_>>>()?;
    let names = tensors.iter().map(|w| w.name().to_string()).collect();
    MixedMatrixEnsemble::with_names(members, names, label)
}
