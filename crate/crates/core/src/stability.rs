//! Von Neumann amplification factors for the model heat problem, and an
//! explicit (FTCS) solver that shows the explicit scheme's conditional
//! stability in practice.
//!
//! Substituting the Fourier mode `e^{i k x}` with `theta = k dx` into the
//! second difference gives the symbol `-4 sin^2(theta/2)`. The explicit
//! update therefore multiplies each mode by `1 - 4C sin^2(theta/2)`, and the
//! Crank-Nicolson update (mesh ratio `C/2` on each time level) by
//! `(1 - 2C sin^2(theta/2)) / (1 + 2C sin^2(theta/2))`.
//!
//! A version with `4C` in both numerator and denominator also circulates; it
//! is the factor for a step of length `2 dt` and does not match the one-step
//! Crank-Nicolson update. Both versions satisfy `|A| < 1` for every `C > 0`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fdcore::GridFunction;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplificationSample {
    pub c_ratio: f64,
    /// Wavenumber angle `k dx`, in `(0, pi]`.
    pub theta: f64,
    pub a_value: f64,
}

/// `1 - 2C (1 - cos theta)`.
pub fn amp_explicit(c_ratio: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    1.0 - 4.0 * c_ratio * s * s
}

/// `(1 - 2C sin^2(theta/2)) / (1 + 2C sin^2(theta/2))`.
pub fn amp_cn(c_ratio: f64, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    let q = 2.0 * c_ratio * s * s;
    (1.0 - q) / (1.0 + q)
}

/// Samples `amp_fn` at `theta = j pi / theta_steps`, `j = 1..=theta_steps`.
pub fn sample_amplification(c_ratio: f64, theta_steps: usize, amp_fn: fn(f64, f64) -> f64) -> Vec<AmplificationSample> {
    (1..=theta_steps)
        .map(|j| {
            let theta = PI * j as f64 / theta_steps as f64;
            AmplificationSample { c_ratio, theta, a_value: amp_fn(c_ratio, theta) }
        })
        .collect()
}

/// One row of the `C,theta,A_explicit,A_cn` table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityRow {
    pub c_ratio: f64,
    pub theta: f64,
    pub a_explicit: f64,
    pub a_cn: f64,
}

pub fn stability_table(c_values: &[f64], theta_steps: usize) -> Result<Vec<StabilityRow>> {
    if theta_steps == 0 {
        return Err(Error::domain("theta_steps", "need at least one wavenumber sample"));
    }
    let mut rows = Vec::with_capacity(c_values.len() * theta_steps);
    for &c in c_values {
        if !(c.is_finite() && c >= 0.0) {
            return Err(Error::domain("c_ratio", format!("must be finite and >= 0, got {c}")));
        }
        for j in 1..=theta_steps {
            let theta = PI * j as f64 / theta_steps as f64;
            rows.push(StabilityRow { c_ratio: c, theta, a_explicit: amp_explicit(c, theta), a_cn: amp_cn(c, theta) });
        }
    }
    Ok(rows)
}

/// Explicit scheme `F[i] += C (F[i-1] - 2F[i] + F[i+1])` on `[0, 1]` from
/// `sin(pi x)` with zero boundaries. Returns `n_time + 1` slices.
pub fn explicit_heat_solve(n_space: usize, n_time: usize, c_ratio: f64) -> Result<Vec<GridFunction>> {
    if n_space < 3 {
        return Err(Error::domain("n_space", format!("need at least 3 intervals, got {n_space}")));
    }
    if !(c_ratio.is_finite() && c_ratio >= 0.0) {
        return Err(Error::domain("c_ratio", format!("must be finite and >= 0, got {c_ratio}")));
    }
    let h = 1.0 / n_space as f64;
    let mut u = GridFunction::sample(|x| (PI * x).sin(), n_space + 1, h, 0.0)?;
    u.values[0] = 0.0;
    u.values[n_space] = 0.0;

    let mut history = Vec::with_capacity(n_time + 1);
    history.push(u);
    for step in 1..=n_time {
        let prev = &history[step - 1].values;
        let mut next = prev.clone();
        for i in 1..n_space {
            next[i] = prev[i] + c_ratio * (prev[i - 1] - 2.0 * prev[i] + prev[i + 1]);
        }
        history.push(GridFunction::new(next, h, 0.0)?);
    }
    Ok(history)
}
