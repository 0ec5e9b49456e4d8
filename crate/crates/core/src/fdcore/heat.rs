//! Crank-Nicolson for `u_t = u_xx` on `[0, 1]` with `u(0,t) = u(1,t) = 0`.

use std::f64::consts::PI;

use super::{thomas_solve, GridFunction, MeshParams, Tridiagonal};
use crate::error::{Error, Result};

/// Model problem with initial data `sin(pi x)`.
///
/// `n_space` is the number of intervals (so `h = 1/n_space`) and the returned
/// history holds `n_time + 1` slices, the first being the initial data.
pub fn cn_heat_solve(n_space: usize, n_time: usize, t_end: f64) -> Result<Vec<GridFunction>> {
    cn_heat_solve_from(|x| (PI * x).sin(), n_space, n_time, t_end)
}

/// Same scheme with arbitrary initial data. Endpoint values of `initial` are
/// overwritten by the homogeneous boundary condition.
pub fn cn_heat_solve_from(
    initial: impl Fn(f64) -> f64,
    n_space: usize,
    n_time: usize,
    t_end: f64,
) -> Result<Vec<GridFunction>> {
    if n_space < 3 {
        return Err(Error::domain("n_space", format!("need at least 3 intervals, got {n_space}")));
    }
    if n_time < 1 {
        return Err(Error::domain("n_time", "need at least one time step"));
    }
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::domain("t_end", format!("must be finite and > 0, got {t_end}")));
    }
    let h = 1.0 / n_space as f64;
    let mesh = MeshParams::new(h, t_end / n_time as f64, 1.0)?;

    let mut u0 = GridFunction::sample(initial, n_space + 1, h, 0.0)?;
    u0.values[0] = 0.0;
    u0.values[n_space] = 0.0;

    // -u[i-1] + 2(1+s) u[i] - u[i+1] = u'[i-1] + 2(s-1) u'[i] + u'[i+1]
    let interior = n_space - 1;
    let system = Tridiagonal::constant(interior, -1.0, mesh.diag_r, -1.0)?;
    let rhs_diag = 2.0 * (mesh.s_ratio - 1.0);

    let mut history = Vec::with_capacity(n_time + 1);
    history.push(u0);
    let mut rhs = vec![0.0; interior];
    for step in 1..=n_time {
        let prev = &history[step - 1].values;
        for (k, b) in rhs.iter_mut().enumerate() {
            let i = k + 1;
            *b = prev[i - 1] + rhs_diag * prev[i] + prev[i + 1];
        }
        let inner = thomas_solve(&system, &rhs).map_err(|e| match e {
            Error::SingularPivot { pivot } => Error::SingularStep { step, pivot },
            other => other,
        })?;
        let mut values = Vec::with_capacity(n_space + 1);
        values.push(0.0);
        values.extend_from_slice(&inner);
        values.push(0.0);
        history.push(GridFunction::new(values, h, 0.0)?);
    }
    Ok(history)
}

/// `e^{-pi^2 t} sin(pi x)`, the exact solution of the model problem.
pub fn heat_exact_solution(x: f64, t: f64) -> f64 {
    (-PI * PI * t).exp() * (PI * x).sin()
}
