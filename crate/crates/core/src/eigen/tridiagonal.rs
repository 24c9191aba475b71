//! Implicit Wilkinson-shift QR on a real symmetric tridiagonal matrix.

use crate::error::{Error, Result};

/// Diagonalizes the tridiagonal matrix `(diag, off)` in place.
///
/// `off[k]` couples rows `k` and `k + 1`. On return `diag` holds the
/// eigenvalues (unsorted) and `off` is zero. Each Givens rotation
/// `G = [[c, s], [-s, c]]` acting on coordinates `(k, k + 1)` is reported to
/// `rotate` so callers can accumulate eigenvectors; the eigenvector matrix
/// `S` satisfies `S <- S Gᵀ` for every reported rotation.
pub(crate) fn tridiagonal_qr<F>(
    diag: &mut [f64],
    off: &mut [f64],
    cap: usize,
    mut rotate: F,
) -> Result<()>
where
    F: FnMut(usize, f64, f64),
{
    let n = diag.len();
    debug_assert_eq!(off.len(), n.saturating_sub(1));
    if n < 2 {
        return Ok(());
    }

    let mut iterations = 0usize;
    let mut hi = n - 1;
    loop {
        for k in 0..hi {
            if negligible(off[k], diag[k], diag[k + 1]) {
                off[k] = 0.0;
            }
        }
        while hi > 0 && off[hi - 1] == 0.0 {
            hi -= 1;
        }
        if hi == 0 {
            return Ok(());
        }
        let mut lo = hi - 1;
        while lo > 0 && off[lo - 1] != 0.0 {
            lo -= 1;
        }

        iterations += 1;
        if iterations > cap {
            return Err(Error::NoConvergence {
                solver: "symmetric tridiagonal",
                cap,
            });
        }
        implicit_step(diag, off, lo, hi, &mut rotate);
    }
}

#[inline]
fn negligible(e: f64, a: f64, b: f64) -> bool {
    e.abs() <= f64::EPSILON * (a.abs() + b.abs()) || e.abs() < f64::MIN_POSITIVE
}

fn wilkinson_shift(a: f64, b: f64, c: f64) -> f64 {
    // trailing block [[a, b], [b, c]]
    let half_gap = (a - c) / 2.0;
    if b == 0.0 {
        return c;
    }
    let sign = if half_gap >= 0.0 { 1.0 } else { -1.0 };
    c - b * b / (half_gap + sign * half_gap.hypot(b))
}

fn implicit_step<F>(diag: &mut [f64], off: &mut [f64], lo: usize, hi: usize, rotate: &mut F)
where
    F: FnMut(usize, f64, f64),
{
    let mu = wilkinson_shift(diag[hi - 1], off[hi - 1], diag[hi]);
    let mut x = diag[lo] - mu;
    let mut y = off[lo];
    for k in lo..hi {
        let r = x.hypot(y);
        let (c, s) = if r == 0.0 { (1.0, 0.0) } else { (x / r, y / r) };
        if k > lo {
            off[k - 1] = r;
        }
        let (dk, dk1, ek) = (diag[k], diag[k + 1], off[k]);
        let cs = c * s;
        diag[k] = c * c * dk + 2.0 * cs * ek + s * s * dk1;
        diag[k + 1] = s * s * dk - 2.0 * cs * ek + c * c * dk1;
        off[k] = cs * (dk1 - dk) + (c * c - s * s) * ek;
        rotate(k, c, s);
        if k + 1 < hi {
            x = off[k];
            y = s * off[k + 1];
            off[k + 1] *= c;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<f64>) -> Vec<f64> {
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn two_by_two() {
        let mut d = vec![0.0, 0.0];
        let mut e = vec![1.0];
        tridiagonal_qr(&mut d, &mut e, 100, |_, _, _| {}).unwrap();
        let d = sorted(d);
        assert!((d[0] + 1.0).abs() < 1e-15 && (d[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn second_difference_matrix() {
        // tridiag(-1, 2, -1) has eigenvalues 2 - 2 cos(kπ/(n+1))
        let n = 50;
        let mut d = vec![2.0; n];
        let mut e = vec![-1.0; n - 1];
        tridiagonal_qr(&mut d, &mut e, 40 * n, |_, _, _| {}).unwrap();
        let got = sorted(d);
        for (k, g) in got.iter().enumerate() {
            let expected =
                2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((g - expected).abs() < 1e-12, "k={k}: {g} vs {expected}");
        }
    }

    #[test]
    fn cap_is_enforced() {
        let mut d = vec![2.0; 10];
        let mut e = vec![-1.0; 9];
        let err = tridiagonal_qr(&mut d, &mut e, 1, |_, _, _| {}).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
    }
}
