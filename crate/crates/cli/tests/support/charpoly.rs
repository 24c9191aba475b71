//! Reference eigenvalues from the characteristic polynomial: Faddeev–LeVerrier
//! coefficients, Durand–Kerner roots, Newton polish.

use num_complex::Complex64;

/// Monic coefficients `c[0] + c[1]·x + … + c[n]·xⁿ` of `det(xI − A)`.
pub fn faddeev_leverrier(a: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = vec![0.0; n * n];
    for k in 1..=n {
        // M_k = A·M_{k−1} + c_{n−k+1}·I
        let mut next = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += a[i * n + l] * m[l * n + j];
                }
                next[i * n + j] = s;
            }
            next[i * n + i] += c[n - k + 1];
        }
        m = next;
        let mut tr = 0.0;
        for i in 0..n {
            for l in 0..n {
                tr += a[i * n + l] * m[l * n + i];
            }
        }
        c[n - k] = -tr / k as f64;
    }
    c
}

fn horner(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

/// All complex roots of a monic polynomial.
pub fn roots(c: &[f64]) -> Vec<Complex64> {
    let n = c.len() - 1;
    let bound = 1.0 + c[..n].iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * bound).collect();
    for _ in 0..5000 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, _) = horner(c, z[i]);
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    den *= z[i] - z[j];
                }
            }
            let step = p / den;
            z[i] -= step;
            moved = moved.max(step.norm() / z[i].norm().max(1.0));
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in &mut z {
        for _ in 0..3 {
            let (p, dp) = horner(c, *zi);
            if dp.norm() == 0.0 {
                break;
            }
            let next = *zi - p / dp;
            if horner(c, next).0.norm() < p.norm() {
                *zi = next;
            } else {
                break;
            }
        }
    }
    z
}

/// Largest distance in a greedy nearest-neighbour pairing of two root sets.
pub fn match_distance(computed: &[Complex64], reference: &[Complex64]) -> f64 {
    assert_eq!(computed.len(), reference.len());
    let mut used = vec![false; reference.len()];
    let mut worst = 0.0f64;
    for z in computed {
        let (j, d) = reference
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, r)| (j, (z - r).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("sizes match");
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}
