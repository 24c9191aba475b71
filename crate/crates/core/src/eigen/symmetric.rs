//! Real symmetric eigenvalues: Householder tridiagonalization followed by
//! implicit-shift QR on the tridiagonal.

use super::tridiagonal::tridiagonal_qr;
use super::{ITERATIONS_PER_ORDER_SYMMETRIC, SYMMETRY_TOL};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn eig_symmetric(x: &Matrix) -> Result<Vec<f64>> {
    if !x.is_square() {
        return Err(Error::InvalidArgument(format!(
            "eig_symmetric needs a square matrix, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let n = x.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = x.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let deviation = x.symmetry_deviation();
    if deviation > SYMMETRY_TOL * scale {
        return Err(Error::NotSymmetric { deviation });
    }
    if !scale.is_finite() {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }

    let (mut diag, mut off) = tridiagonalize(x);
    tridiagonal_qr(
        &mut diag,
        &mut off,
        ITERATIONS_PER_ORDER_SYMMETRIC * n,
        |_, _, _| {},
    )?;
    diag.sort_by(f64::total_cmp);
    Ok(diag)
}

/// Reduces a symmetric matrix to tridiagonal form `(diag, off)` by
/// Householder similarity transforms. Only the lower triangle of `x` is read.
pub(crate) fn tridiagonalize(x: &Matrix) -> (Vec<f64>, Vec<f64>) {
    let n = x.rows();
    let mut a = x.clone();
    // mirror the lower triangle so both halves agree exactly
    for i in 0..n {
        for j in 0..i {
            a[(j, i)] = a[(i, j)];
        }
    }
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let base = k + 1;
        let v = &mut v[..m];
        let p = &mut p[..m];
        v.copy_from_slice(&a.row(k)[base..]);

        let tail_sq: f64 = v[1..].iter().map(|t| t * t).sum();
        diag[k] = a[(k, k)];
        if tail_sq == 0.0 {
            off[k] = v[0];
            continue;
        }
        let norm = (v[0] * v[0] + tail_sq).sqrt();
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let tau = 2.0 / (v[0] * v[0] + tail_sq);
        off[k] = alpha;

        // p = tau * A22 v
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a.row(base + i)[base..];
            *pi = tau * row.iter().zip(v.iter()).map(|(r, vj)| r * vj).sum::<f64>();
        }
        let half_k = 0.5 * tau * v.iter().zip(p.iter()).map(|(a, b)| a * b).sum::<f64>();
        for (pi, vi) in p.iter_mut().zip(v.iter()) {
            *pi -= half_k * vi;
        }
        // A22 -= v wᵀ + w vᵀ
        let cols = a.cols();
        let data = a.as_mut_slice();
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut data[(base + i) * cols + base..(base + i + 1) * cols];
            for ((r, vj), wj) in row.iter_mut().zip(v.iter()).zip(p.iter()) {
                *r -= vi * wj + wi * vj;
            }
        }
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2, n - 2)];
        off[n - 2] = a[(n - 1, n - 2)];
    }
    diag[n - 1] = a[(n - 1, n - 1)];
    (diag, off)
}
