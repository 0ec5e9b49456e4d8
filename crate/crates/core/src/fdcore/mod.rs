//! Central difference operators, the Thomas tridiagonal solver and a
//! Crank-Nicolson solver for the model heat problem.

mod heat;
mod tridiag;

pub use heat::{cn_heat_solve, cn_heat_solve_from, heat_exact_solution};
pub use tridiag::{thomas_solve, Tridiagonal};

use crate::error::{Error, Result};

/// Samples of a function on the uniform nodes `origin + i*h`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub values: Vec<f64>,
    pub h: f64,
    pub origin: f64,
}

impl GridFunction {
    pub fn new(values: Vec<f64>, h: f64, origin: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::domain("h", format!("spacing must be finite and > 0, got {h}")));
        }
        Ok(GridFunction { values, h, origin })
    }

    /// Samples `f` at `n` nodes starting at `origin`.
    pub fn sample(f: impl Fn(f64) -> f64, n: usize, h: f64, origin: f64) -> Result<Self> {
        let values = (0..n).map(|i| f(origin + i as f64 * h)).collect();
        Self::new(values, h, origin)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn node(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.h
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Discrete L2 norm `sqrt(h * sum v_i^2)`.
    pub fn l2_norm(&self) -> f64 {
        (self.h * self.values.iter().map(|v| v * v).sum::<f64>()).sqrt()
    }

    fn check_interior(&self, i: usize) -> Result<()> {
        let n = self.values.len();
        if n < 3 || i == 0 || i + 1 >= n {
            return Err(Error::out_of_range(
                "difference index",
                format!("need 1 <= i <= n-2 with n >= 3, got i={i}, n={n}"),
            ));
        }
        Ok(())
    }
}

/// `(f[i+1] - f[i-1]) / 2h`, second-order accurate.
pub fn central_first_diff(f: &GridFunction, i: usize) -> Result<f64> {
    f.check_interior(i)?;
    Ok((f.values[i + 1] - f.values[i - 1]) / (2.0 * f.h))
}

/// `(f[i+1] + f[i-1] - 2 f[i]) / h^2`, second-order accurate.
pub fn central_second_diff(f: &GridFunction, i: usize) -> Result<f64> {
    f.check_interior(i)?;
    let v = &f.values;
    Ok((v[i + 1] + v[i - 1] - 2.0 * v[i]) / (f.h * f.h))
}

/// Mesh constants of a constant-coefficient diffusion discretisation.
///
/// Two reciprocal conventions are carried: `s_ratio = h^2/dt` (the one that
/// appears in the Crank-Nicolson tridiagonal system, whose diagonal is
/// `diag_r = 2(1 + s_ratio)`) and `c_ratio = D dt / h^2` (the one that governs
/// explicit-scheme stability). For `D = 1` they are inverses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshParams {
    pub h: f64,
    pub dt: f64,
    pub s_ratio: f64,
    pub diag_r: f64,
    pub c_ratio: f64,
    pub diffusivity: f64,
}

impl MeshParams {
    pub fn new(h: f64, dt: f64, diffusivity: f64) -> Result<Self> {
        for (field, v) in [("h", h), ("dt", dt), ("diffusivity", diffusivity)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(field, format!("must be finite and > 0, got {v}")));
            }
        }
        let s_ratio = h * h / dt;
        Ok(MeshParams {
            h,
            dt,
            s_ratio,
            diag_r: 2.0 * (1.0 + s_ratio),
            c_ratio: diffusivity * dt / (h * h),
            diffusivity,
        })
    }
}
