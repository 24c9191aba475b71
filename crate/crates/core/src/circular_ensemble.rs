//! Conjugate circular ensembles.
//!
//! A circular unitary matrix of order `N` is assembled from the eigenvectors
//! of a fresh Gaussian unitary (Hermitian) matrix: row `i` of `U` is the
//! `i`-th eigenvector multiplied by an independent uniform phase
//! `exp(iγᵢ)`. The ensemble member is the elementwise modulus `|U|`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::eigen::hermitian_eig;
use crate::error::{Error, Result};
use crate::layer_ensemble::MixedMatrixEnsemble;
use crate::matrix::{ComplexMatrix, Matrix};
use crate::rng::{RandomStream, RngState};

/// Hermitian `H` with `H_ij = ½(a_ij + i b_ij + a_ji − i b_ji)`,
/// `a`, `b` i.i.d. standard normal.
pub fn sample_gue_hermitian(n: usize, rng: RngState) -> Result<ComplexMatrix> {
    let mut stream = rng.stream();
    gue_from_stream(n, &mut stream)
}

fn gue_from_stream(n: usize, stream: &mut RandomStream) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::OrderTooSmall(n));
    }
    let a: Vec<f64> = (0..n * n).map(|_| stream.normal()).collect();
    let b: Vec<f64> = (0..n * n).map(|_| stream.normal()).collect();
    let mut h = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let (ij, ji) = (i * n + j, j * n + i);
            h[(i, j)] = Complex64::new(0.5 * (a[ij] + a[ji]), 0.5 * (b[ij] - b[ji]));
        }
    }
    Ok(h)
}

/// `U[i, j] = exp(iγᵢ) · v⁽ⁱ⁾_j` with `v⁽ⁱ⁾` the `i`-th eigenvector of a
/// fresh GUE matrix and `γᵢ` uniform on `[0, 2π)`.
pub fn sample_cue_unitary(n: usize, rng: RngState) -> Result<ComplexMatrix> {
    let mut stream = rng.stream();
    let h = gue_from_stream(n, &mut stream)?;
    let eig = hermitian_eig(&h)?;
    let mut u = eig.vectors;
    for i in 0..n {
        let gamma = stream.phase();
        let phase = Complex64::new(libm::cos(gamma), libm::sin(gamma));
        u.row_mut(i).iter_mut().for_each(|z| *z *= phase);
    }
    Ok(u)
}

/// Elementwise complex modulus.
pub fn modulus_matrix(u: &ComplexMatrix) -> Matrix {
    let n = u.order();
    Matrix::from_vec(
        n,
        n,
        u.as_slice().iter().map(|z| z.re.hypot(z.im)).collect(),
    )
}

/// Order-matched ensemble of `|U|` matrices, `repetitions` per order.
///
/// Members are laid out repetition-major within each order:
/// `[(o₀, r₀), (o₀, r₁), …, (o₁, r₀), …]`. Each member draws from its own
/// stream, so the result does not depend on thread scheduling.
pub fn build_conjugate_ensemble(
    orders: &[usize],
    seed: u64,
    repetitions: usize,
) -> Result<MixedMatrixEnsemble> {
    if orders.is_empty() {
        return Err(Error::EmptyEnsemble);
    }
    if repetitions == 0 {
        return Err(Error::InvalidArgument(
            "repetitions must be at least 1".into(),
        ));
    }
    if let Some(&bad) = orders.iter().find(|&&n| n < 2) {
        return Err(Error::OrderTooSmall(bad));
    }
    let jobs: Vec<(usize, usize, usize)> = orders
        .iter()
        .enumerate()
        .flat_map(|(pos, &n)| (0..repetitions).map(move |r| (pos, r, n)))
        .collect();
    let members = jobs
        .par_iter()
        .enumerate()
        .map(|(index, &(pos, r, n))| {
            sample_cue_unitary(n, RngState::for_member(seed, pos, r))
                .map(|u| modulus_matrix(&u))
                .map_err(|e| Error::Member {
                    index,
                    name: format!("cue[{pos}.{r}]/N={n}"),
                    order: n,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let names = jobs
        .iter()
        .map(|&(pos, r, n)| format!("cue[{pos}.{r}]/N={n}"))
        .collect();
    MixedMatrixEnsemble::with_names(members, names, format!("cue(seed={seed})"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::eig_general;

    #[test]
    fn gue_is_hermitian_with_real_diagonal() {
        let h = sample_gue_hermitian(2, RngState::new(3, 0)).unwrap();
        assert_eq!(h[(0, 1)], h[(1, 0)].conj());
        assert_eq!(h[(0, 0)].im, 0.0);
        assert_eq!(h[(1, 1)].im, 0.0);
        let h = sample_gue_hermitian(17, RngState::new(5, 2)).unwrap();
        assert_eq!(h.hermitian_deviation(), 0.0);
    }

    #[test]
    fn gue_diagonal_mean_is_centered() {
        // diagonal entries are N(0, 1); 4/√n is a four-sigma bound on their mean
        let n = 64;
        let h = sample_gue_hermitian(n, RngState::new(20240601, 0)).unwrap();
        let mean = (0..n).map(|i| h[(i, i)].re).sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "mean {mean}");
    }

    #[test]
    fn gue_deterministic() {
        let a = sample_gue_hermitian(6, RngState::new(99, 4)).unwrap();
        let b = sample_gue_hermitian(6, RngState::new(99, 4)).unwrap();
        assert_eq!(a, b);
        assert!(sample_gue_hermitian(1, RngState::new(0, 0)).is_err());
    }

    #[test]
    fn cue_is_unitary_with_unimodular_spectrum() {
        for &n in &[2usize, 5, 16, 40] {
            let u = sample_cue_unitary(n, RngState::new(17, n as u64)).unwrap();
            assert!(u.unitarity_deviation() <= 1e-8, "n={n}");
            let ev = eig_general(&u.to_real_embedding()).unwrap();
            assert!(ev.iter().all(|z| (z.norm() - 1.0).abs() <= 1e-6), "n={n}");
        }
    }

    #[test]
    fn cue_two_by_two_golden() {
        // Frozen from the first run after the unitarity and unimodularity
        // checks above passed; guards the sampler against silent drift.
        let u = sample_cue_unitary(2, RngState::new(0x5EED, 0)).unwrap();
        let got: Vec<(f64, f64)> = u.as_slice().iter().map(|z| (z.re, z.im)).collect();
        let golden = GOLDEN_CUE_2X2;
        for (g, e) in got.iter().zip(golden.iter()) {
            assert!(
                (g.0 - e.0).abs() < 1e-14 && (g.1 - e.1).abs() < 1e-14,
                "{got:?}"
            );
        }
    }

    const GOLDEN_CUE_2X2: [(f64, f64); 4] = [
        (0.12130349665537621, 0.7320142676851417),
        (-0.12870158810481097, -0.6579334881459252),
        (-0.38705164959807437, -0.5473861472013831),
        (-0.4457463554812315, -0.5931859851434748),
    ];

    #[test]
    fn modulus_of_identity_and_345() {
        let id = ComplexMatrix::identity(3);
        assert_eq!(modulus_matrix(&id), Matrix::identity(3));
        let mut u = ComplexMatrix::zeros(2);
        u[(0, 1)] = Complex64::new(0.6, 0.8);
        assert_eq!(modulus_matrix(&u)[(0, 1)], 1.0);
    }

    #[test]
    fn modulus_rows_have_unit_norm() {
        let u = sample_cue_unitary(32, RngState::new(8, 8)).unwrap();
        let a = modulus_matrix(&u);
        for i in 0..32 {
            let norm: f64 = a.row(i).iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((norm - 1.0).abs() <= 1e-10);
            assert!(a.row(i).iter().all(|&x| x >= 0.0));
        }
    }

    #[test]
    fn conjugate_ensemble_layout_and_determinism() {
        let e1 = build_conjugate_ensemble(&[4, 8, 16], 77, 1).unwrap();
        assert_eq!(e1.orders(), vec![4, 8, 16]);
        assert!(e1
            .members()
            .iter()
            .all(|m| m.as_slice().iter().all(|&x| x >= 0.0)));
        let e2 = build_conjugate_ensemble(&[4, 8, 16], 77, 1).unwrap();
        assert_eq!(e1, e2);

        let reps = build_conjugate_ensemble(&[4, 8], 77, 3).unwrap();
        assert_eq!(reps.orders(), vec![4, 4, 4, 8, 8, 8]);
        // repetition 0 of each order matches the single-repetition ensemble
        assert_eq!(reps.members()[0], e1.members()[0]);
        assert_eq!(reps.members()[3], e1.members()[1]);
    }

    #[test]
    fn conjugate_ensemble_errors() {
        assert!(matches!(
            build_conjugate_ensemble(&[], 0, 1),
            Err(Error::EmptyEnsemble)
        ));
        assert!(matches!(
            build_conjugate_ensemble(&[4, 1], 0, 1),
            Err(Error::OrderTooSmall(1))
        ));
        assert!(build_conjugate_ensemble(&[4], 0, 0).is_err());
    }
}
