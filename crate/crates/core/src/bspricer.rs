//! Crank-Nicolson solver for the Black-Scholes PDE in asset-price coordinates.
//!
//! The equation is marched in time-to-expiry `tau = T - t`, starting from the
//! payoff at `tau = 0`:
//!
//! ```text
//! V_tau = 1/2 sigma^2 S^2 V_SS + r S V_S - r V  =:  L V
//! (I - dtau/2 L) V^{j+1} = (I + dtau/2 L) V^j
//! ```
//!
//! with Dirichlet values at `S = 0` and `S = s_max` taken from the boundary
//! conditions of each option type.

use rayon::prelude::*;

use crate::analytic::{self, payoff, MarketQuery, OptionKind, OptionSpec};
use crate::error::{Error, Result};
use crate::fdcore::{thomas_solve, Tridiagonal};

/// Uniform asset-price grid `S_i = i * spacing`, `i = 0..=n_space`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialGrid {
    pub s_max: f64,
    pub n_space: usize,
    pub spacing: f64,
}

impl SpatialGrid {
    pub fn new(s_max: f64, n_space: usize) -> Result<Self> {
        if !(s_max.is_finite() && s_max > 0.0) {
            return Err(Error::domain("s_max", format!("must be finite and > 0, got {s_max}")));
        }
        if n_space < 3 {
            return Err(Error::domain("n_space", format!("need at least 3 intervals, got {n_space}")));
        }
        Ok(SpatialGrid { s_max, n_space, spacing: s_max / n_space as f64 })
    }

    /// Grid close to `(s_max, n_space)` on which `strike` lies exactly halfway
    /// between two nodes.
    ///
    /// The spacing is shrunk just enough to put the strike at `(j + 1/2) dS`.
    /// When `strike / s_max` is commensurate with the new spacing only the
    /// node count changes; otherwise `s_max` is stretched by less than one
    /// spacing.
    pub fn strike_midway(s_max: f64, n_space: usize, strike: f64) -> Result<Self> {
        let base = Self::new(s_max, n_space)?;
        if !(strike.is_finite() && strike > 0.0 && strike < s_max) {
            return Err(Error::domain("strike", format!("must lie in (0, s_max = {s_max}) for midway placement")));
        }
        let j = (strike / base.spacing).floor();
        let spacing = strike / (j + 0.5);
        let m_exact = s_max / spacing;
        let m = m_exact.round();
        if (m - m_exact).abs() <= 1e-9 * m_exact {
            return Self::new(s_max, m as usize);
        }
        let m = m_exact.ceil() as usize;
        Ok(SpatialGrid { s_max: m as f64 * spacing, n_space: m, spacing })
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n_space {
            self.s_max
        } else {
            i as f64 * self.spacing
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_space).map(|i| self.node(i)).collect()
    }
}

/// `n_time` equal steps covering `[0, expiry]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub n_time: usize,
    pub step: f64,
    pub expiry: f64,
}

impl TimeGrid {
    pub fn new(expiry: f64, n_time: usize) -> Result<Self> {
        if !(expiry.is_finite() && expiry > 0.0) {
            return Err(Error::domain("expiry", format!("must be finite and > 0, got {expiry}")));
        }
        if n_time < 1 {
            return Err(Error::domain("n_time", "need at least one time step"));
        }
        Ok(TimeGrid { n_time, step: expiry / n_time as f64, expiry })
    }

    /// Time to expiry at step `j`; the last step is pinned to `expiry`.
    pub fn tau(&self, j: usize) -> f64 {
        if j == self.n_time {
            self.expiry
        } else {
            j as f64 * self.step
        }
    }
}

/// Option values on the `(S, tau)` grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSurface {
    pub spec: OptionSpec,
    pub grid: SpatialGrid,
    pub tgrid: TimeGrid,
    /// Node-major: `values[i * (n_time + 1) + j]` is `V(S_i, tau_j)`.
    pub values: Vec<f64>,
    pub s_axis: Vec<f64>,
    pub tau_axis: Vec<f64>,
}

impl PriceSurface {
    pub fn n_rows(&self) -> usize {
        self.s_axis.len()
    }

    pub fn n_cols(&self) -> usize {
        self.tau_axis.len()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols() + j]
    }

    /// All nodes at time step `j`.
    pub fn slice(&self, j: usize) -> Vec<f64> {
        (0..self.n_rows()).map(|i| self.value(i, j)).collect()
    }

    /// Bilinear interpolation at calendar time `time` (so `tau = T - time`).
    /// Exact at grid nodes.
    pub fn price_at(&self, spot: f64, time: f64) -> Result<f64> {
        let s_max = self.grid.s_max;
        if !(spot.is_finite() && (0.0..=s_max).contains(&spot)) {
            return Err(Error::out_of_range("spot", format!("{spot} not in [0, {s_max}]")));
        }
        let expiry = self.spec.expiry;
        if !(time.is_finite() && (0.0..=expiry).contains(&time)) {
            return Err(Error::out_of_range("time", format!("{time} not in [0, {expiry}]")));
        }
        let (i0, ws) = locate(spot / self.grid.spacing, self.grid.n_space);
        let (j0, wt) = locate((expiry - time) / self.tgrid.step, self.tgrid.n_time);

        let at = |i: usize, j: usize| self.value(i, j);
        let lerp_s = |j: usize| {
            if ws == 0.0 {
                at(i0, j)
            } else {
                (1.0 - ws) * at(i0, j) + ws * at(i0 + 1, j)
            }
        };
        if wt == 0.0 {
            Ok(lerp_s(j0))
        } else {
            Ok((1.0 - wt) * lerp_s(j0) + wt * lerp_s(j0 + 1))
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Cell index and weight of the upper neighbour for a fractional index.
/// Fractions within 1e-9 of a node snap to it.
fn locate(frac_index: f64, n: usize) -> (usize, f64) {
    let nearest = frac_index.round();
    if (frac_index - nearest).abs() <= 1e-9 {
        return ((nearest as usize).min(n), 0.0);
    }
    let i0 = (frac_index.floor() as usize).min(n - 1);
    (i0, (frac_index - i0 as f64).clamp(0.0, 1.0))
}

/// Bands of the discrete operator `L` over all nodes `0..=M`.
///
/// Row `i` of the result is
/// `(1/2 s^2 S_i^2/dS^2 - r S_i/(2 dS), -s^2 S_i^2/dS^2 - r, 1/2 s^2 S_i^2/dS^2 + r S_i/(2 dS))`;
/// since `S_i / dS = i`, the coefficients are formed from the node index.
/// The boundary rows are included for completeness but never used in a solve.
pub fn build_bs_operator(spec: &OptionSpec, grid: &SpatialGrid) -> Tridiagonal {
    let n = grid.n_space + 1;
    let var = spec.volatility * spec.volatility;
    let r = spec.rate;
    let mut lower = Vec::with_capacity(n - 1);
    let mut diag = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n - 1);
    for i in 0..n {
        let fi = i as f64;
        let diffusion = 0.5 * var * fi * fi;
        let convection = 0.5 * r * fi;
        if i > 0 {
            lower.push(diffusion - convection);
        }
        diag.push(-2.0 * diffusion - r);
        if i + 1 < n {
            upper.push(diffusion + convection);
        }
    }
    Tridiagonal { lower, diag, upper }
}

pub fn terminal_payoff(spec: &OptionSpec, grid: &SpatialGrid) -> Vec<f64> {
    (0..=grid.n_space).map(|i| payoff(spec.kind, grid.node(i), spec.strike)).collect()
}

/// Dirichlet values `(V(0, tau), V(s_max, tau))`.
///
/// Call: `(0, s_max - E e^{-r tau})`. Put: `(E e^{-r tau}, 0)`.
pub fn boundary_values(spec: &OptionSpec, grid: &SpatialGrid, tau: f64) -> (f64, f64) {
    let disc = spec.strike * (-spec.rate * tau).exp();
    match spec.kind {
        OptionKind::Call => (0.0, grid.s_max - disc),
        OptionKind::Put => (disc, 0.0),
    }
}

/// Marches the Crank-Nicolson scheme from the payoff to `tau = T`.
pub fn cn_bs_solve(spec: &OptionSpec, grid: &SpatialGrid, tgrid: &TimeGrid) -> Result<PriceSurface> {
    spec.validate()?;
    if grid.s_max < spec.strike {
        return Err(Error::domain("s_max", format!("{} is below the strike {}", grid.s_max, spec.strike)));
    }
    if (tgrid.expiry - spec.expiry).abs() > 1e-12 * spec.expiry {
        return Err(Error::domain("expiry", "time grid does not span the option's expiry"));
    }
    let m = grid.n_space;
    let n = tgrid.n_time;
    let cols = n + 1;
    let op = build_bs_operator(spec, grid);
    let half = 0.5 * tgrid.step;

    // Interior system I - dtau/2 L over nodes 1..=M-1.
    let interior = m - 1;
    let system = Tridiagonal {
        lower: op.lower[1..interior].iter().map(|a| -half * a).collect(),
        diag: op.diag[1..m].iter().map(|b| 1.0 - half * b).collect(),
        upper: op.upper[1..interior].iter().map(|c| -half * c).collect(),
    };

    let s_axis = grid.nodes();
    let tau_axis: Vec<f64> = (0..=n).map(|j| tgrid.tau(j)).collect();
    let mut values = vec![0.0; (m + 1) * cols];

    let mut current = terminal_payoff(spec, grid);
    for (i, v) in current.iter().enumerate() {
        values[i * cols] = *v;
    }

    let mut rhs = vec![0.0; interior];
    let mut next = vec![0.0; m + 1];
    for j in 1..=n {
        let (low, high) = boundary_values(spec, grid, tau_axis[j]);
        for (k, b) in rhs.iter_mut().enumerate() {
            let i = k + 1;
            let lv = op.lower[i - 1] * current[i - 1] + op.diag[i] * current[i] + op.upper[i] * current[i + 1];
            *b = current[i] + half * lv;
        }
        rhs[0] += half * op.lower[0] * low;
        rhs[interior - 1] += half * op.upper[m - 1] * high;

        let inner = thomas_solve(&system, &rhs).map_err(|e| match e {
            Error::SingularPivot { pivot } => Error::SingularStep { step: j, pivot },
            other => other,
        })?;
        next[0] = low;
        next[1..m].copy_from_slice(&inner);
        next[m] = high;
        for (i, v) in next.iter().enumerate() {
            values[i * cols + j] = *v;
        }
        std::mem::swap(&mut current, &mut next);
    }

    Ok(PriceSurface { spec: *spec, grid: *grid, tgrid: *tgrid, values, s_axis, tau_axis })
}

/// One refinement level of a convergence study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub m: usize,
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    pub error: f64,
    /// Observed order against the previous (coarser) row.
    pub order: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
}

/// One refinement level: `(m, n, h, dt, error)`.
pub type Level = (usize, usize, f64, f64, f64);

impl ConvergenceReport {
    /// Builds a report from `(m, n, h, dt, error)` levels ordered coarse to
    /// fine, filling in the pairwise orders.
    pub fn from_levels(levels: impl IntoIterator<Item = Level>) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::new();
        for (m, n, h, dt, error) in levels {
            let order = rows.last().map(|prev| observed_order(prev.error, error, prev.h / h));
            rows.push(ConvergenceRow { m, n, h, dt, error, order });
        }
        ConvergenceReport { rows }
    }

    /// Least-squares slope of `ln(error)` against `ln(h)` over all rows.
    pub fn fitted_order(&self) -> Option<f64> {
        if self.rows.len() < 2 {
            return None;
        }
        let pts: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.h.ln(), r.error.ln())).collect();
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        Some(sxy / sxx)
    }
}

/// `ln(e_coarse / e_fine) / ln(refinement)`; `log2` of the error ratio when the
/// spacing halves.
pub fn observed_order(e_coarse: f64, e_fine: f64, refinement: f64) -> f64 {
    if e_coarse == e_fine {
        return 0.0;
    }
    (e_coarse / e_fine).ln() / refinement.ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceConfig {
    pub s_max: f64,
    pub strike_midway: bool,
    pub probe_spot: f64,
    pub probe_time: f64,
}

impl ConvergenceConfig {
    /// `s_max = 4E`, probe at `S = E`, `t = 0`, nodes not shifted.
    pub fn for_spec(spec: &OptionSpec) -> Self {
        ConvergenceConfig { s_max: 4.0 * spec.strike, strike_midway: false, probe_spot: spec.strike, probe_time: 0.0 }
    }
}

/// Doubles `M` and `N` per level and measures the error at the probe point
/// against the closed form. Levels are solved in parallel; rows come back in
/// refinement order.
pub fn convergence_study(
    spec: &OptionSpec,
    base_m: usize,
    base_n: usize,
    levels: usize,
    cfg: &ConvergenceConfig,
) -> Result<ConvergenceReport> {
    if levels < 2 {
        return Err(Error::domain("levels", format!("need at least 2 levels, got {levels}")));
    }
    let exact = analytic::price(spec, &MarketQuery::new(cfg.probe_spot, cfg.probe_time))?;
    let results: Vec<Result<Level>> = (0..levels)
        .into_par_iter()
        .map(|l| {
            let m = base_m << l;
            let n = base_n << l;
            let grid = if cfg.strike_midway {
                SpatialGrid::strike_midway(cfg.s_max, m, spec.strike)?
            } else {
                SpatialGrid::new(cfg.s_max, m)?
            };
            let tgrid = TimeGrid::new(spec.expiry, n)?;
            let surface = cn_bs_solve(spec, &grid, &tgrid)?;
            let v = surface.price_at(cfg.probe_spot, cfg.probe_time)?;
            Ok((grid.n_space, n, grid.spacing, tgrid.step, (v - exact).abs()))
        })
        .collect();
    let levels = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::from_levels(levels))
}
