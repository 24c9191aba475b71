//! Built-in invariant checks behind `csd selftest`.
//!
//! Every tolerance is multiplied by [`SelftestOptions::tolerance_scale`];
//! scaling them to zero is the negative control that must make checks fail.

use num_complex::Complex64;

use crate::circular_ensemble::{
    build_conjugate_ensemble, modulus_matrix, sample_cue_unitary, sample_gue_hermitian,
};
use crate::eigen::{eig_general, eig_symmetric, hermitian_eig};
use crate::equivalence::{csd, csd_variance};
use crate::layer_ensemble::gram_of_matrix;
use crate::matrix::{ComplexMatrix, Matrix};
use crate::rng::RngState;
use crate::spectra::{spectral_density, PooledSpectrum, SpectralGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelftestOptions {
    pub seed: u64,
    pub tolerance_scale: f64,
}

impl Default for SelftestOptions {
    fn default() -> Self {
        Self {
            seed: 20201,
            tolerance_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn bound(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            passed: value.is_finite() && value <= limit,
            detail: format!("{value:.3e} <= {limit:.1e}"),
        }
    }

    fn flag(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }

    fn failed(name: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Self {
            name: name.into(),
            passed: false,
            detail: format!("error: {err}"),
        }
    }
}

fn random_matrix(n: usize, rng: RngState) -> Matrix {
    let mut s = rng.stream();
    Matrix::from_vec(n, n, (0..n * n).map(|_| s.normal()).collect())
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

pub fn run_selftest(opts: &SelftestOptions) -> Vec<CheckResult> {
    let t = opts.tolerance_scale;
    let seed = opts.seed;
    let mut out = Vec::new();

    for &n in &[2usize, 8, 64] {
        let name = format!("cue unitarity n={n}");
        match sample_cue_unitary(n, RngState::new(seed, n as u64)) {
            Ok(u) => out.push(CheckResult::bound(name, u.unitarity_deviation(), 1e-8 * t)),
            Err(e) => out.push(CheckResult::failed(name, e)),
        }
    }

    let name = "cue eigenvalues on unit circle n=8";
    match sample_cue_unitary(8, RngState::new(seed, 100))
        .and_then(|u| eig_general(&u.to_real_embedding()))
    {
        Ok(ev) => {
            let worst = ev
                .iter()
                .map(|z| (z.norm() - 1.0).abs())
                .fold(0.0, f64::max);
            out.push(CheckResult::bound(name, worst, 1e-6 * t));
        }
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    let name = "modulus rows unit norm n=32";
    match sample_cue_unitary(32, RngState::new(seed, 101)) {
        Ok(u) => {
            let a = modulus_matrix(&u);
            let worst = (0..32)
                .map(|i| (a.row(i).iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs())
                .fold(0.0, f64::max);
            out.push(CheckResult::bound(name, worst, 1e-10 * t));
        }
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    // rank-deficient Gram: 12 rows, 5 columns
    let name = "gram psd (12x5)";
    let mut s = RngState::new(seed, 200).stream();
    let a = Matrix::from_vec(12, 5, (0..60).map(|_| s.normal()).collect());
    let x = gram_of_matrix(&a);
    match eig_symmetric(&x) {
        Ok(ev) => {
            let lmax = ev.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let worst_negative = ev.iter().fold(0.0f64, |m, &v| m.max(-v));
            out.push(CheckResult::bound(name, worst_negative / lmax, 1e-8 * t));
        }
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    let name = "symmetric solver diag(2,0,3)";
    match eig_symmetric(&Matrix::from_diag(&[2.0, 0.0, 3.0])) {
        Ok(ev) => out.push(CheckResult::flag(
            name,
            ev == [0.0, 2.0, 3.0],
            format!("{ev:?}"),
        )),
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    let name = "symmetric solver trace/frobenius n=64";
    let x = gram_of_matrix(&random_matrix(64, RngState::new(seed, 201)));
    match eig_symmetric(&x) {
        Ok(ev) => {
            let tr = rel(ev.iter().sum(), x.trace());
            let fro = rel(ev.iter().map(|v| v * v).sum(), x.frobenius_norm_sq());
            out.push(CheckResult::bound(name, tr.max(fro), 1e-9 * t));
        }
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    let name = "hermitian solver pauli-y";
    let mut pauli = ComplexMatrix::zeros(2);
    pauli[(0, 1)] = Complex64::new(0.0, -1.0);
    pauli[(1, 0)] = Complex64::new(0.0, 1.0);
    match hermitian_eig(&pauli) {
        Ok(eig) => {
            let err = (eig.values[0] + 1.0).abs().max((eig.values[1] - 1.0).abs());
            out.push(CheckResult::bound(name, err, 1e-12 * t));
        }
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    let name = "hermitian residual n=16";
    match sample_gue_hermitian(16, RngState::new(seed, 300))
        .and_then(|h| hermitian_eig(&h).map(|e| (h, e)))
    {
        Ok((h, eig)) => {
            let mut worst = 0.0f64;
            for (k, &lambda) in eig.values.iter().enumerate() {
                let v = eig.eigenvector(k);
                let r: f64 = (0..16)
                    .map(|i| {
                        let hv: Complex64 = h.row(i).iter().zip(v).map(|(a, b)| a * b).sum();
                        (hv - v[i] * lambda).norm_sqr()
                    })
                    .sum::<f64>()
                    .sqrt();
                worst = worst.max(r);
            }
            out.push(CheckResult::bound(
                name,
                worst / h.frobenius_norm(),
                1e-8 * t,
            ));
        }
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    let name = "general solver rotation";
    match eig_general(&Matrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]])) {
        Ok(ev) => {
            let err = (ev[0] - Complex64::new(0.0, -1.0))
                .norm()
                .max((ev[1] - Complex64::new(0.0, 1.0)).norm());
            out.push(CheckResult::bound(name, err, 1e-12 * t));
        }
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    let name = "general solver trace and conjugate closure n=48";
    let a = random_matrix(48, RngState::new(seed, 400));
    match eig_general(&a) {
        Ok(ev) => {
            let scale = a.frobenius_norm_sq().sqrt();
            let tr = (ev.iter().map(|z| z.re).sum::<f64>() - a.trace()).abs() / scale;
            let sum_im = ev.iter().map(|z| z.im).sum::<f64>().abs() / scale;
            out.push(CheckResult::bound(name, tr.max(sum_im), 1e-9 * t));
        }
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    let name = "perron eigenvalue of |U| n=24";
    match sample_cue_unitary(24, RngState::new(seed, 500))
        .and_then(|u| eig_general(&modulus_matrix(&u)))
    {
        Ok(ev) => {
            let top = ev.iter().copied().fold(Complex64::new(0.0, 0.0), |m, z| {
                if z.norm() > m.norm() {
                    z
                } else {
                    m
                }
            });
            let gap = top.im.abs() / top.norm();
            out.push(CheckResult::bound(name, gap, 1e-12 * t));
        }
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    let name = "density mass identity";
    let mut s = RngState::new(seed, 600).stream();
    let pooled = PooledSpectrum::new((0..5000).map(|_| 8.0 * s.uniform() - 1.0).collect(), "u");
    match spectral_density(&pooled, &SpectralGrid::default()) {
        Ok(d) => out.push(CheckResult::bound(
            name,
            (d.mass() - d.in_range_fraction).abs(),
            1e-12 * t,
        )),
        Err(e) => out.push(CheckResult::failed(name, e)),
    }

    let name = "csd self-difference and antisymmetry";
    let mut s = RngState::new(seed, 601).stream();
    let other = PooledSpectrum::new((0..5000).map(|_| 3.0 * s.uniform()).collect(), "v");
    match (
        spectral_density(&pooled, &SpectralGrid::default()),
        spectral_density(&other, &SpectralGrid::default()),
    ) {
        (Ok(a), Ok(b)) => match (csd(&a, &a), csd(&a, &b), csd(&b, &a)) {
            (Ok(zero), Ok(ab), Ok(ba)) => {
                let self_err =
                    zero.delta.iter().fold(0.0f64, |m, d| m.max(d.abs())) + csd_variance(&zero);
                let anti = ab
                    .delta
                    .iter()
                    .zip(&ba.delta)
                    .fold(0.0f64, |m, (x, y)| m.max((x + y).abs()));
                let var_gap = (csd_variance(&ab) - csd_variance(&ba)).abs();
                out.push(CheckResult::bound(
                    name,
                    self_err.max(anti).max(var_gap),
                    1e-12 * t,
                ));
            }
            _ => out.push(CheckResult::failed(name, "grid mismatch")),
        },
        _ => out.push(CheckResult::failed(name, "invalid grid")),
    }

    let name = "conjugate ensemble determinism across worker counts";
    let orders = [5usize, 9, 3, 12];
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())
            .and_then(|pool| {
                pool.install(|| build_conjugate_ensemble(&orders, seed, 2))
                    .map_err(|e| e.to_string())
            })
    };
    match (run(1), run(3)) {
        (Ok(a), Ok(b)) => out.push(CheckResult::flag(name, a == b, "1 vs 3 workers")),
        (Err(e), _) | (_, Err(e)) => out.push(CheckResult::failed(name, e)),
    }

    out
}

/// Fixed-width table of check results.
pub fn format_table(results: &[CheckResult]) -> String {
    let width = results
        .iter()
        .map(|r| r.name.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut s = format!("{:<width$}  {:<6}  {}\n", "check", "status", "detail");
    for r in results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        s.push_str(&format!(
            "{:<width$}  {:<6}  {}\n",
            r.name, status, r.detail
        ));
    }
    let passed = results.iter().filter(|r| r.passed).count();
    s.push_str(&format!("{passed}/{} checks passed\n", results.len()));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_build_passes() {
        let results = run_selftest(&SelftestOptions::default());
        let failed: Vec<_> = results.iter().filter(|r| !r.passed).collect();
        assert!(failed.is_empty(), "{failed:#?}");
    }

    #[test]
    fn zero_tolerance_is_caught() {
        let results = run_selftest(&SelftestOptions {
            tolerance_scale: 0.0,
            ..Default::default()
        });
        assert!(results.iter().any(|r| !r.passed));
    }

    #[test]
    fn repeatable() {
        let a = format_table(&run_selftest(&SelftestOptions::default()));
        let b = format_table(&run_selftest(&SelftestOptions::default()));
        assert_eq!(a, b);
    }
}
