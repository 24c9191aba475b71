//! Eigenvalues of a general real matrix: balancing, Householder reduction to
//! upper Hessenberg form, then Francis double-shift QR.

use num_complex::Complex64;

use super::ITERATIONS_PER_ORDER_GENERAL;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// All eigenvalues of a real square matrix.
///
/// Complex eigenvalues come in exact conjugate pairs. The result is sorted
/// by real part, then imaginary part.
pub fn eig_general(a: &Matrix) -> Result<Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::InvalidArgument(format!(
            "eig_general needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "matrix has non-finite entries".into(),
        ));
    }
    let n = a.rows();
    let mut h = a.clone();
    balance(&mut h);
    hessenberg(&mut h);
    let mut values = hessenberg_qr(&mut h, ITERATIONS_PER_ORDER_GENERAL * n.max(1))?;
    values.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(values)
}

/// Parlett–Reinsch balancing with power-of-two scale factors (exact in
/// floating point).
pub(crate) fn balance(a: &mut Matrix) {
    let n = a.rows();
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut col = 0.0;
            let mut row = 0.0;
            for j in 0..n {
                if j != i {
                    col += a[(j, i)].abs();
                    row += a[(i, j)].abs();
                }
            }
            if col == 0.0 || row == 0.0 {
                continue;
            }
            let sum = col + row;
            let mut f = 1.0;
            let mut c = col;
            let g = row / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            let g = row * 2.0;
            while c >= g {
                f /= 2.0;
                c /= 4.0;
            }
            // c is now col·f², so (c + row)/f is the balanced row+column sum
            if (c + row) / f < 0.95 * sum {
                converged = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                }
                for j in 0..n {
                    a[(j, i)] *= f;
                }
            }
        }
    }
}

/// In-place reduction to upper Hessenberg form; entries below the
/// subdiagonal are set to exactly zero.
pub(crate) fn hessenberg(a: &mut Matrix) {
    let n = a.rows();
    let mut v = vec![0.0; n];
    let mut s = vec![0.0; n];
    for k in 0..n.saturating_sub(2) {
        let base = k + 1;
        let m = n - base;
        let v = &mut v[..m];
        for (i, vi) in v.iter_mut().enumerate() {
            *vi = a[(base + i, k)];
        }
        let tail_sq: f64 = v[1..].iter().map(|t| t * t).sum();
        if tail_sq == 0.0 {
            continue;
        }
        let norm = (v[0] * v[0] + tail_sq).sqrt();
        let alpha = if v[0] >= 0.0 { -norm } else { norm };
        v[0] -= alpha;
        let tau = 2.0 / (v[0] * v[0] + tail_sq);

        // left: rows base.., columns k..
        let cols = n;
        let s = &mut s[k..];
        s.iter_mut().for_each(|x| *x = 0.0);
        {
            let data = a.as_slice();
            for (i, vi) in v.iter().enumerate() {
                let row = &data[(base + i) * cols + k..(base + i + 1) * cols];
                for (sj, r) in s.iter_mut().zip(row) {
                    *sj += vi * r;
                }
            }
        }
        {
            let data = a.as_mut_slice();
            for (i, vi) in v.iter().enumerate() {
                let f = tau * vi;
                let row = &mut data[(base + i) * cols + k..(base + i + 1) * cols];
                for (r, sj) in row.iter_mut().zip(s.iter()) {
                    *r -= f * sj;
                }
            }
        }
        // right: all rows, columns base..
        {
            let data = a.as_mut_slice();
            for r in 0..n {
                let row = &mut data[r * cols + base..(r + 1) * cols];
                let t = tau * row.iter().zip(v.iter()).map(|(x, y)| x * y).sum::<f64>();
                for (x, vi) in row.iter_mut().zip(v.iter()) {
                    *x -= t * vi;
                }
            }
        }
        a[(base, k)] = alpha;
        for i in (base + 1)..n {
            a[(i, k)] = 0.0;
        }
    }
}

/// Householder reflector `I - tau v vᵀ` mapping `u` onto a multiple of e₁.
/// Returns `None` when `u` is zero. `u` is overwritten with `v`.
fn reflector(u: &mut [f64]) -> Option<(f64, f64)> {
    let norm_sq: f64 = u.iter().map(|x| x * x).sum();
    if norm_sq == 0.0 {
        return None;
    }
    let norm = norm_sq.sqrt();
    let alpha = if u[0] >= 0.0 { -norm } else { norm };
    u[0] -= alpha;
    let vv: f64 = u.iter().map(|x| x * x).sum();
    Some((2.0 / vv, alpha))
}

fn eig_2x2(a: f64, b: f64, c: f64, d: f64) -> (Complex64, Complex64) {
    let mid = 0.5 * (a + d);
    let p = 0.5 * (a - d);
    let disc = p * p + b * c;
    if disc >= 0.0 {
        let r = disc.sqrt();
        let l1 = if p >= 0.0 { mid + r } else { mid - r };
        let l2 = if l1 != 0.0 {
            (a * d - b * c) / l1
        } else {
            2.0 * mid - l1
        };
        (Complex64::new(l1, 0.0), Complex64::new(l2, 0.0))
    } else {
        let im = (-disc).sqrt();
        (Complex64::new(mid, im), Complex64::new(mid, -im))
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix, eigenvalues only.
/// Work is confined to the active window since no Schur vectors are kept.
pub(crate) fn hessenberg_qr(h: &mut Matrix, cap: usize) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut values = Vec::with_capacity(n);
    if n == 0 {
        return Ok(values);
    }
    let norm = h.as_slice().iter().map(|v| v.abs()).fold(0.0, f64::max);
    let eps = f64::EPSILON;
    let mut hi = n as isize - 1;
    let mut total = 0usize;
    let mut since_deflation = 0usize;

    while hi >= 0 {
        let h_idx = hi as usize;
        let mut l = h_idx;
        while l > 0 {
            let mut s = h[(l - 1, l - 1)].abs() + h[(l, l)].abs();
            if s == 0.0 {
                s = norm;
            }
            if h[(l, l - 1)].abs() <= eps * s {
                h[(l, l - 1)] = 0.0;
                break;
            }
            l -= 1;
        }

        if l == h_idx {
            values.push(Complex64::new(h[(h_idx, h_idx)], 0.0));
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if l + 1 == h_idx {
            let (l1, l2) = eig_2x2(h[(l, l)], h[(l, h_idx)], h[(h_idx, l)], h[(h_idx, h_idx)]);
            values.push(l1);
            values.push(l2);
            hi -= 2;
            since_deflation = 0;
            continue;
        }

        total += 1;
        since_deflation += 1;
        if total > cap {
            return Err(Error::NoConvergence {
                solver: "Hessenberg QR",
                cap,
            });
        }

        let (shift_sum, shift_prod) = if since_deflation % 10 == 0 {
            let s = h[(h_idx, h_idx - 1)].abs() + h[(h_idx - 1, h_idx - 2)].abs();
            let h11 = 0.75 * s + h[(h_idx, h_idx)];
            (2.0 * h11, h11 * h11 + 0.4375 * s * s)
        } else {
            let (a, b, c, d) = (
                h[(h_idx - 1, h_idx - 1)],
                h[(h_idx - 1, h_idx)],
                h[(h_idx, h_idx - 1)],
                h[(h_idx, h_idx)],
            );
            (a + d, a * d - b * c)
        };
        francis_step(h, l, h_idx, shift_sum, shift_prod);
    }
    Ok(values)
}

fn francis_step(h: &mut Matrix, lo: usize, hi: usize, shift_sum: f64, shift_prod: f64) {
    let h00 = h[(lo, lo)];
    let h10 = h[(lo + 1, lo)];
    let mut x = h00 * h00 + h[(lo, lo + 1)] * h10 - shift_sum * h00 + shift_prod;
    let mut y = h10 * (h00 + h[(lo + 1, lo + 1)] - shift_sum);
    let mut z = h10 * h[(lo + 2, lo + 1)];

    for k in lo..hi {
        let nr = if k + 2 <= hi { 3 } else { 2 };
        let mut u = [x, y, z];
        let u = &mut u[..nr];
        let scale: f64 = u.iter().map(|t| t.abs()).sum();
        if scale != 0.0 {
            u.iter_mut().for_each(|t| *t /= scale);
        }
        if let Some((tau, alpha)) = reflector(u) {
            let first_col = if k > lo { k - 1 } else { lo };
            // rows k..k+nr
            for j in first_col..=hi {
                let dot: f64 = (0..nr).map(|i| u[i] * h[(k + i, j)]).sum();
                let f = tau * dot;
                for i in 0..nr {
                    h[(k + i, j)] -= f * u[i];
                }
            }
            // columns k..k+nr
            let last_row = (k + 3).min(hi);
            for r in lo..=last_row {
                let dot: f64 = (0..nr).map(|i| h[(r, k + i)] * u[i]).sum();
                let f = tau * dot;
                for i in 0..nr {
                    h[(r, k + i)] -= f * u[i];
                }
            }
            if k > lo {
                h[(k, k - 1)] = alpha * scale;
                for i in 1..nr {
                    h[(k + i, k - 1)] = 0.0;
                }
            }
        }
        if k + 1 < hi {
            x = h[(k + 1, k)];
            y = h[(k + 2, k)];
            if k + 3 <= hi {
                z = h[(k + 3, k)];
            }
        }
    }
}
