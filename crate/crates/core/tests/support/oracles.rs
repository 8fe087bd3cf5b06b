//! Brute-force reference computations, independent of the library formulas.
#![allow(dead_code)]

use nalgebra::DMatrix;

/// Q0 of the real mode f_r = 1, f_θ = i a, f_z = b, written out from
/// Λ|in f_θ − m̂ f_z + f_r|² + 2|in f_θ + f_r|² + 2m̂²|f_z|² + |in f_z + m̂ f_θ|².
pub fn q0_real(a: f64, b: f64, m_hat: f64, n: f64, big_lambda: f64) -> f64 {
    let div = 1.0 - n * a - m_hat * b;
    let hoop = 1.0 - n * a;
    let shear = n * b + m_hat * a;
    big_lambda * div * div + 2.0 * hoop * hoop + 2.0 * m_hat * m_hat * b * b + shear * shear
}

/// Golden-section minimum of a unimodal function on [lo, hi].
pub fn golden_section(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iterations: usize) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iterations {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Nested golden-section minimization of q0_real over (a, b) ∈ [−R, R]².
pub fn brute_tangential(m_hat: f64, n: f64, big_lambda: f64) -> (f64, f64) {
    let k2 = m_hat * m_hat + n * n;
    let r = 10.0 * (1.0 + 1.0 / k2);
    let inner = |b: f64| golden_section(|a| q0_real(a, b, m_hat, n, big_lambda), -r, r, 120);
    let b = golden_section(|b| q0_real(inner(b), b, m_hat, n, big_lambda), -r, r, 120);
    (inner(b), b)
}

/// Negative pivots of the symmetric matrix A by elimination without pivoting;
/// by Sylvester's law this is the number of negative eigenvalues.
pub fn negative_pivots(a: &DMatrix<f64>) -> usize {
    let n = a.nrows();
    let mut w = a.clone();
    let mut count = 0;
    for k in 0..n {
        let mut p = w[(k, k)];
        if p == 0.0 {
            p = -f64::MIN_POSITIVE;
        }
        if p < 0.0 {
            count += 1;
        }
        for i in k + 1..n {
            let l = w[(i, k)] / p;
            for j in k + 1..n {
                w[(i, j)] -= l * w[(k, j)];
            }
        }
    }
    count
}

/// Smallest root of det(S − σM) for S ⪰ 0, M ≻ 0 by bisection on the inertia
/// of S − σM.
pub fn bisect_min_eigenvalue(s: &DMatrix<f64>, m: &DMatrix<f64>) -> f64 {
    let (mut lo, mut hi) = (0.0, s[(0, 0)] / m[(0, 0)]);
    while negative_pivots(&(s - m * hi)) == 0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if negative_pivots(&(s - m * mid)) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// S = AᵀA (+ shift) and M = BᵀB + I from entries in [−1, 1].
pub fn spd_pair(n: usize, entries: &[f64], shift: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let a = DMatrix::from_fn(n, n, |i, j| entries[i * n + j]);
    let b = DMatrix::from_fn(n, n, |i, j| entries[n * n + i * n + j]);
    let s = a.transpose() * &a + DMatrix::identity(n, n) * shift;
    let m = b.transpose() * &b + DMatrix::identity(n, n);
    (s, m)
}

/// Least-squares slope of log v against log h, without the library.
pub fn log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
