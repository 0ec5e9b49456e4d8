//! Independent reference computations used only by the test suites.
#![allow(dead_code)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Adaptive Simpson with absolute tolerance, plain recursion.
pub fn adaptive_simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        eps: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let d = left + right - whole;
        if depth == 0 || d.abs() <= 15.0 * eps {
            return left + right + d / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    step(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), eps, 50)
}

/// Standard normal CDF by quadrature of the density: `1/2 + int_0^x phi`.
pub fn norm_cdf_quad(x: f64) -> f64 {
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * PI).sqrt();
    let n = 16;
    let h = x / n as f64;
    let mut sum = 0.0;
    for k in 0..n {
        let a = k as f64 * h;
        sum += adaptive_simpson(&phi, a, a + h, 1e-18);
    }
    0.5 + sum
}

/// Dense Gaussian elimination with partial pivoting.
pub fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, p);
        b.swap(col, p);
        let (top, rest) = a.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for (k, row) in rest.iter_mut().enumerate() {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
            b[col + 1 + k] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let s: f64 = (i + 1..n).map(|k| a[i][k] * x[k]).sum();
        x[i] = (b[i] - s) / a[i][i];
    }
    x
}

pub fn to_dense(lower: &[f64], diag: &[f64], upper: &[f64]) -> Vec<Vec<f64>> {
    let n = diag.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        m[i][i] = diag[i];
        if i > 0 {
            m[i][i - 1] = lower[i - 1];
        }
        if i + 1 < n {
            m[i][i + 1] = upper[i];
        }
    }
    m
}

/// Random strictly diagonally dominant bands of order `n`.
pub fn random_dominant_bands(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lower: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
    let upper: Vec<f64> = (0..n - 1).map(|_| rng.random_range(-1.0..1.0)).collect();
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let off = if i > 0 { lower[i - 1].abs() } else { 0.0 } + if i + 1 < n { upper[i].abs() } else { 0.0 };
            let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            sign * (off + rng.random_range(0.1..2.0))
        })
        .collect();
    let rhs: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
    (lower, diag, upper, rhs)
}

/// Closed form of the call heat-convolution: `I1 - I2`.
pub fn heat_call_closed_form(k: f64, x: f64, tau: f64) -> f64 {
    let r2t = (2.0 * tau).sqrt();
    let d1 = x / r2t + 0.5 * (k + 1.0) * r2t;
    let d2 = x / r2t + 0.5 * (k - 1.0) * r2t;
    let i1 = (0.5 * (k + 1.0) * x + 0.25 * (k + 1.0).powi(2) * tau).exp() * norm_cdf_quad(d1);
    let i2 = (0.5 * (k - 1.0) * x + 0.25 * (k - 1.0).powi(2) * tau).exp() * norm_cdf_quad(d2);
    i1 - i2
}

/// Closed-form call built on the quadrature CDF.
pub fn bs_call_quad(s: f64, e: f64, r: f64, sigma: f64, tau: f64) -> f64 {
    let vs = sigma * tau.sqrt();
    let d1 = ((s / e).ln() + (r + 0.5 * sigma * sigma) * tau) / vs;
    s * norm_cdf_quad(d1) - e * (-r * tau).exp() * norm_cdf_quad(d1 - vs)
}

/// Least-squares slope of ln(err) on ln(h).
pub fn fitted_slope(hs: &[f64], errs: &[f64]) -> f64 {
    let k = hs.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
