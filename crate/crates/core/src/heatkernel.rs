//! Pricing through the heat equation.
//!
//! With `S = E e^x`, `t = T - tau / (sigma^2/2)` and `V = E e^{alpha x + beta tau} u(x, tau)`,
//! the Black-Scholes equation becomes `u_tau = u_xx` on the whole line. Its
//! solution is the convolution of the transformed payoff with the heat kernel,
//!
//! ```text
//! u(x, tau) = 1 / (2 sqrt(pi tau)) * Integral u0(s) exp(-(x - s)^2 / (4 tau)) ds
//! ```
//!
//! which this module evaluates by adaptive Simpson quadrature. Nothing here
//! calls into [`crate::analytic`]; the two are independent routes to the same
//! price.

use std::f64::consts::PI;

use crate::analytic::{payoff, MarketQuery, OptionKind, OptionSpec};
use crate::error::{Error, Result};

/// Gaussian tail level at which the integration window is cut.
const TAIL_EPS: f64 = 1e-16;
const MAX_DEPTH: u32 = 48;
const START_PANELS: usize = 64;

/// Dimensionless coordinates of the heat-equation form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatCoords {
    /// Log-moneyness `ln(S/E)`.
    pub x: f64,
    /// `sigma^2 (T - t) / 2`.
    pub tau: f64,
    /// `r / (sigma^2 / 2)`.
    pub k_dim: f64,
    /// `-(k - 1) / 2`.
    pub alpha: f64,
    /// `-(k + 1)^2 / 4`.
    pub beta: f64,
}

impl HeatCoords {
    pub fn from_k(x: f64, tau: f64, k_dim: f64) -> Self {
        HeatCoords { x, tau, k_dim, alpha: -0.5 * (k_dim - 1.0), beta: -0.25 * (k_dim + 1.0) * (k_dim + 1.0) }
    }
}

pub fn to_heat_coords(spec: &OptionSpec, q: &MarketQuery) -> Result<HeatCoords> {
    spec.validate()?;
    q.validate(spec)?;
    if q.spot <= 0.0 {
        return Err(Error::domain("spot", "heat coordinates need spot > 0"));
    }
    if spec.volatility <= 0.0 {
        return Err(Error::domain("volatility", "heat coordinates need volatility > 0"));
    }
    let half_var = 0.5 * spec.volatility * spec.volatility;
    Ok(HeatCoords::from_k((q.spot / spec.strike).ln(), half_var * q.time_to_expiry(spec), spec.rate / half_var))
}

/// Transformed payoff.
///
/// Call: `max(e^{(k+1)x/2} - e^{(k-1)x/2}, 0)`; put: the same with the terms swapped.
pub fn u0(x: f64, k_dim: f64, kind: OptionKind) -> f64 {
    let up = (0.5 * (k_dim + 1.0) * x).exp();
    let down = (0.5 * (k_dim - 1.0) * x).exp();
    match kind {
        OptionKind::Call => (up - down).max(0.0),
        OptionKind::Put => (down - up).max(0.0),
    }
}

/// `u(x, tau)` for the call or put initial data, by quadrature with relative
/// error target `tol`. At `tau == 0` returns `u0(x)`.
pub fn heat_convolution(kind: OptionKind, k_dim: f64, x: f64, tau: f64, tol: f64) -> Result<f64> {
    let c = Convolution::new(kind, k_dim, x, tau, tol)?;
    if tau == 0.0 {
        return Ok(u0(x, k_dim, kind));
    }
    let (log_scale, integral) = c.evaluate();
    Ok(integral * (log_scale - (2.0 * (PI * tau).sqrt()).ln()).exp())
}

/// Price as `E e^{alpha x + beta tau} u(x, tau)`.
///
/// The exponential prefactor and the scale of the integrand are combined in
/// log space, so deep in- or out-of-the-money spots do not overflow.
pub fn price_via_heat_kernel(spec: &OptionSpec, q: &MarketQuery, tol: f64) -> Result<f64> {
    let hc = to_heat_coords(spec, q)?;
    let conv = Convolution::new(spec.kind, hc.k_dim, hc.x, hc.tau, tol)?;
    if hc.tau == 0.0 {
        return Ok(payoff(spec.kind, q.spot, spec.strike));
    }
    let (log_scale, integral) = conv.evaluate();
    if integral == 0.0 {
        return Ok(0.0);
    }
    let log_pref = hc.alpha * hc.x + hc.beta * hc.tau - (2.0 * (PI * hc.tau).sqrt()).ln();
    Ok(spec.strike * integral * (log_pref + log_scale).exp())
}

/// Composite Simpson rule with `panels` (rounded up to even) subintervals.
pub fn composite_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = (panels.max(2) + 1) & !1;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Integration window `[lo, hi]` on the support of `u0` for the given kind.
///
/// The half-width `sqrt(4 tau ln(1/eps)) + (k+1) tau` bounds the Gaussian
/// tail times the exponential growth of `u0` by `eps`; measuring it from the
/// support-clamped centre keeps the cut relative to the integrand's own peak
/// even when `x` lies far outside the support.
pub fn integration_window(kind: OptionKind, k_dim: f64, x: f64, tau: f64) -> (f64, f64) {
    let w = (4.0 * tau * (1.0 / TAIL_EPS).ln()).sqrt() + (k_dim.abs() + 1.0) * tau;
    match kind {
        OptionKind::Call => ((x - w).max(0.0), x.max(0.0) + w),
        OptionKind::Put => (x.min(0.0) - w, (x + w).min(0.0)),
    }
}

struct Convolution {
    kind: OptionKind,
    k_dim: f64,
    x: f64,
    tau: f64,
    tol: f64,
}

impl Convolution {
    fn new(kind: OptionKind, k_dim: f64, x: f64, tau: f64, tol: f64) -> Result<Self> {
        if !k_dim.is_finite() || !x.is_finite() {
            return Err(Error::domain("x", "heat coordinates must be finite"));
        }
        if !(tau.is_finite() && tau >= 0.0) {
            return Err(Error::domain("tau", format!("must be finite and >= 0, got {tau}")));
        }
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::domain("tol", format!("must be finite and > 0, got {tol}")));
        }
        Ok(Convolution { kind, k_dim, x, tau, tol })
    }

    /// Log of the Gaussian-weighted growth term `c s - (x - s)^2 / 4 tau`.
    fn exponent(&self, s: f64, c: f64) -> f64 {
        let d = self.x - s;
        c * s - d * d / (4.0 * self.tau)
    }

    /// Returns `(m, I)` with the unnormalised convolution integral equal to `e^m * I`.
    fn evaluate(&self) -> (f64, f64) {
        let (mut lo, mut hi) = integration_window(self.kind, self.k_dim, self.x, self.tau);
        if hi <= lo {
            return (0.0, 0.0);
        }
        // Dominant exponential rate on the support; the other term is folded
        // into an expm1 factor that stays accurate next to the kink at s = 0.
        let c = match self.kind {
            OptionKind::Call => 0.5 * (self.k_dim + 1.0),
            OptionKind::Put => 0.5 * (self.k_dim - 1.0),
        };
        let peak = (self.x + 2.0 * self.tau * c).clamp(lo, hi);
        let m = self.exponent(peak, c);
        // With the peak clamped to an end the exponent is concave and falls at
        // least as fast as its tangent there, which can be far narrower than
        // the Gaussian window when tau is small.
        let slope = c + (self.x - peak) / (2.0 * self.tau);
        let reach = 2.0 * (1.0 / TAIL_EPS).ln();
        if peak == lo && slope < 0.0 {
            hi = hi.min(lo - reach / slope);
        } else if peak == hi && slope > 0.0 {
            lo = lo.max(hi - reach / slope);
        }
        let kind = self.kind;
        let f = |s: f64| {
            // exponent(s) - exponent(peak), factored to avoid cancellation
            let g = ((s - peak) * (c - (s + peak - 2.0 * self.x) / (4.0 * self.tau))).exp();
            match kind {
                OptionKind::Call => -g * (-s).exp_m1(),
                OptionKind::Put => -g * s.exp_m1(),
            }
        };

        let coarse = composite_simpson(f, lo, hi, 4 * START_PANELS);
        if coarse == 0.0 {
            return (m, 0.0);
        }
        let eps = self.tol * coarse.abs();
        let h = (hi - lo) / START_PANELS as f64;
        let mut total = 0.0;
        for p in 0..START_PANELS {
            let a = lo + p as f64 * h;
            let b = if p + 1 == START_PANELS { hi } else { a + h };
            total += adaptive_simpson(&f, a, b, eps / START_PANELS as f64);
        }
        (m, total)
    }
}

fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, eps: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let mid = 0.5 * (a + b);
    let fm = f(mid);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, eps, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
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
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * eps {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1)
}
