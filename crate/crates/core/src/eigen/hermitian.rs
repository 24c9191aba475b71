//! Complex Hermitian eigendecomposition.
//!
//! Householder reflections reduce `H` to a tridiagonal matrix with complex
//! off-diagonal; a diagonal unitary rescaling makes the off-diagonal real,
//! after which the real tridiagonal QR iteration runs with its rotations
//! applied to the accumulated eigenvector basis.

use num_complex::Complex64;

use super::tridiagonal::tridiagonal_qr;
use super::{HERMITIAN_TOL, ITERATIONS_PER_ORDER_SYMMETRIC};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Relative eigenvalue gap below which eigenvectors are treated as one
/// degenerate cluster and explicitly re-orthogonalized.
pub const DEGENERACY_GAP: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Row `i` is the unit eigenvector for `values[i]`, phase-normalized so
    /// its largest-modulus component is real and positive.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn eigenvector(&self, i: usize) -> &[Complex64] {
        self.vectors.row(i)
    }
}

struct Reflector {
    v: Vec<Complex64>,
    tau: f64,
}

pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    let n = h.order();
    let scale = h.max_abs();
    if !scale.is_finite() {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let deviation = h.hermitian_deviation();
    if deviation > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::NotHermitian { deviation });
    }
    if n == 0 {
        return Ok(HermitianEigen {
            values: Vec::new(),
            vectors: ComplexMatrix::zeros(0),
        });
    }

    let mut a = h.clone();
    // Use the lower triangle as the source of truth; the real diagonal is enforced.
    for i in 0..n {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in 0..i {
            a[(j, i)] = a[(i, j)].conj();
        }
    }

    let mut diag = vec![0.0; n];
    let mut sub = vec![ZERO; n.saturating_sub(1)];
    let mut reflectors: Vec<Option<Reflector>> = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let m = n - k - 1;
        let base = k + 1;
        let mut v: Vec<Complex64> = (0..m).map(|i| a[(base + i, k)]).collect();
        diag[k] = a[(k, k)].re;
        let tail_sq: f64 = v[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail_sq == 0.0 {
            sub[k] = v[0];
            reflectors.push(None);
            continue;
        }
        let norm = (v[0].norm_sqr() + tail_sq).sqrt();
        let x0_abs = v[0].norm();
        let phase = if x0_abs == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            v[0] / x0_abs
        };
        let alpha = -phase * norm;
        v[0] -= alpha;
        let tau = 2.0 / v.iter().map(|z| z.norm_sqr()).sum::<f64>();
        sub[k] = alpha;

        let p = &mut p[..m];
        for (i, pi) in p.iter_mut().enumerate() {
            let row = &a.row(base + i)[base..];
            *pi = row
                .iter()
                .zip(v.iter())
                .map(|(r, vj)| r * vj)
                .sum::<Complex64>()
                * tau;
        }
        let vp: f64 = v
            .iter()
            .zip(p.iter())
            .map(|(vi, pi)| vi.conj() * pi)
            .sum::<Complex64>()
            .re;
        let half_k = 0.5 * tau * vp;
        for (pi, vi) in p.iter_mut().zip(v.iter()) {
            *pi -= vi * half_k;
        }
        // A22 -= v w^* + w v^*
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a.row_mut(base + i)[base..];
            for ((r, vj), wj) in row.iter_mut().zip(v.iter()).zip(p.iter()) {
                *r -= vi * wj.conj() + wi * vj.conj();
            }
        }
        reflectors.push(Some(Reflector { v, tau }));
    }
    if n >= 2 {
        diag[n - 2] = a[(n - 2, n - 2)].re;
        sub[n - 2] = a[(n - 1, n - 2)];
    }
    diag[n - 1] = a[(n - 1, n - 1)].re;

    // Q = P_0 P_1 ... accumulated right-to-left.
    let mut q = ComplexMatrix::identity(n);
    let mut s = vec![ZERO; n];
    for (k, refl) in reflectors.iter().enumerate().rev() {
        let Some(Reflector { v, tau }) = refl else {
            continue;
        };
        let base = k + 1;
        let s = &mut s[base..];
        s.iter_mut().for_each(|x| *x = ZERO);
        for (i, vi) in v.iter().enumerate() {
            let vc = vi.conj();
            for (sj, qij) in s.iter_mut().zip(&q.row(base + i)[base..]) {
                *sj += vc * qij;
            }
        }
        for (i, vi) in v.iter().enumerate() {
            let f = vi * *tau;
            for (qij, sj) in q.row_mut(base + i)[base..].iter_mut().zip(s.iter()) {
                *qij -= f * sj;
            }
        }
    }

    // D = diag(d_j) with T' = D^* T D real.
    let mut phases = vec![Complex64::new(1.0, 0.0); n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for k in 0..n.saturating_sub(1) {
        let b = sub[k];
        let r = b.norm();
        off[k] = r;
        phases[k + 1] = if r == 0.0 {
            phases[k]
        } else {
            phases[k] * (b / r)
        };
    }

    // Rows of `z` are the columns of Q D.
    let mut z = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            z[(j, i)] = q[(i, j)] * phases[j];
        }
    }

    tridiagonal_qr(
        &mut diag,
        &mut off,
        ITERATIONS_PER_ORDER_SYMMETRIC * n,
        |k, c, s| {
            let (head, tail) = z.as_mut_slice().split_at_mut((k + 1) * n);
            let rk = &mut head[k * n..];
            let rk1 = &mut tail[..n];
            for (x, y) in rk.iter_mut().zip(rk1.iter_mut()) {
                let (xv, yv) = (*x, *y);
                *x = xv * c + yv * s;
                *y = yv * c - xv * s;
            }
        },
    )?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.row_mut(dst).copy_from_slice(z.row(src));
    }

    let h_norm = h.frobenius_norm();
    reorthogonalize_clusters(&values, &mut vectors, DEGENERACY_GAP * h_norm);
    for i in 0..n {
        normalize_phase(vectors.row_mut(i));
    }
    Ok(HermitianEigen { values, vectors })
}

fn reorthogonalize_clusters(values: &[f64], vectors: &mut ComplexMatrix, gap: f64) {
    let n = values.len();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] < gap {
            end += 1;
        }
        if end - start > 1 {
            for _pass in 0..2 {
                for i in start..end {
                    for j in start..i {
                        let proj: Complex64 = vectors
                            .row(j)
                            .iter()
                            .zip(vectors.row(i))
                            .map(|(a, b)| a.conj() * b)
                            .sum();
                        let (rj, ri) = split_rows(vectors, j, i);
                        for (x, y) in ri.iter_mut().zip(rj.iter()) {
                            *x -= proj * y;
                        }
                    }
                    let norm = vectors
                        .row(i)
                        .iter()
                        .map(|z| z.norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    if norm > 0.0 {
                        vectors.row_mut(i).iter_mut().for_each(|z| *z /= norm);
                    }
                }
            }
        }
        start = end;
    }
}

/// Borrows row `j` immutably and row `i` mutably; requires `j < i`.
fn split_rows(m: &mut ComplexMatrix, j: usize, i: usize) -> (&[Complex64], &mut [Complex64]) {
    let n = m.order();
    let (head, tail) = m.as_mut_slice().split_at_mut(i * n);
    (&head[j * n..(j + 1) * n], &mut tail[..n])
}

fn normalize_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_mod = -1.0;
    for (i, z) in v.iter().enumerate() {
        let m = z.norm();
        if m > best_mod {
            best_mod = m;
            best = i;
        }
    }
    if best_mod > 0.0 {
        let rot = v[best].conj() / best_mod;
        v.iter_mut().for_each(|z| *z *= rot);
        v[best] = Complex64::new(v[best].re, 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn residual(h: &ComplexMatrix, eig: &HermitianEigen) -> f64 {
        let n = h.order();
        let mut worst = 0.0f64;
        for (k, &lambda) in eig.values.iter().enumerate() {
            let v = eig.eigenvector(k);
            let r: f64 = (0..n)
                .map(|i| {
                    let hv: Complex64 = h.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
                    (hv - v[i] * lambda).norm_sqr()
                })
                .sum::<f64>()
                .sqrt();
            worst = worst.max(r);
        }
        worst
    }

    #[test]
    fn diagonal_gives_permuted_identity() {
        let mut h = ComplexMatrix::zeros(3);
        h[(0, 0)] = c(3.0, 0.0);
        h[(1, 1)] = c(1.0, 0.0);
        h[(2, 2)] = c(2.0, 0.0);
        let eig = hermitian_eig(&h).unwrap();
        assert_eq!(eig.values, vec![1.0, 2.0, 3.0]);
        let expected_index = [1, 2, 0];
        for (row, &idx) in expected_index.iter().enumerate() {
            for j in 0..3 {
                let want = if j == idx { 1.0 } else { 0.0 };
                assert!((eig.eigenvector(row)[j] - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn pauli_y() {
        let mut h = ComplexMatrix::zeros(2);
        h[(0, 1)] = c(0.0, -1.0);
        h[(1, 0)] = c(0.0, 1.0);
        let eig = hermitian_eig(&h).unwrap();
        assert!((eig.values[0] + 1.0).abs() < 1e-15);
        assert!((eig.values[1] - 1.0).abs() < 1e-15);
        assert!(residual(&h, &eig) < 1e-14);
    }

    #[test]
    fn dense_complex_residual_and_orthonormality() {
        let n = 9;
        let mut h = ComplexMatrix::zeros(n);
        for i in 0..n {
            h[(i, i)] = c((i as f64).sin() * 3.0, 0.0);
            for j in 0..i {
                let z = c(((i * 7 + j) as f64).cos(), ((i + 3 * j) as f64).sin());
                h[(i, j)] = z;
                h[(j, i)] = z.conj();
            }
        }
        let eig = hermitian_eig(&h).unwrap();
        assert!(residual(&h, &eig) < 1e-12 * h.frobenius_norm());
        assert!(eig.vectors.unitarity_deviation() < 1e-13);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn degenerate_spectrum_stays_orthonormal() {
        // 4x4 with eigenvalue 1 of multiplicity 3: H = I + u u^*
        let u = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        let mut h = ComplexMatrix::identity(4);
        for i in 0..4 {
            for j in 0..4 {
                h[(i, j)] += u[i] * u[j].conj();
            }
        }
        let eig = hermitian_eig(&h).unwrap();
        for (g, e) in eig.values.iter().zip([1.0, 1.0, 1.0, 2.0]) {
            assert!((g - e).abs() < 1e-14);
        }
        assert!(eig.vectors.unitarity_deviation() < 1e-14);
        assert!(residual(&h, &eig) < 1e-14);
    }

    #[test]
    fn phase_convention() {
        let mut h = ComplexMatrix::zeros(3);
        h[(0, 1)] = c(0.3, 0.8);
        h[(1, 0)] = c(0.3, -0.8);
        h[(1, 2)] = c(-1.0, 0.2);
        h[(2, 1)] = c(-1.0, -0.2);
        let eig = hermitian_eig(&h).unwrap();
        for i in 0..3 {
            let v = eig.eigenvector(i);
            let (idx, _) = v.iter().enumerate().fold((0, -1.0), |(bi, bm), (j, z)| {
                if z.norm() > bm {
                    (j, z.norm())
                } else {
                    (bi, bm)
                }
            });
            assert_eq!(v[idx].im, 0.0);
            assert!(v[idx].re > 0.0);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut h = ComplexMatrix::zeros(2);
        h[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(hermitian_eig(&h), Err(Error::NotHermitian { .. })));
    }
}
