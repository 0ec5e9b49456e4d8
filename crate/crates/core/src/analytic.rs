//! Closed-form Black-Scholes valuation and put-call parity.
//!
//! Every other pricing route in the crate is checked against these functions.

use crate::error::{Error, Result};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OptionKind {
    Call,
    Put,
}

impl std::fmt::Display for OptionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OptionKind::Call => f.write_str("call"),
            OptionKind::Put => f.write_str("put"),
        }
    }
}

/// Contract terms of a European vanilla option.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptionSpec {
    pub kind: OptionKind,
    /// Exercise price, > 0.
    pub strike: f64,
    /// Continuously compounded risk-free rate per annum, >= 0.
    pub rate: f64,
    /// Volatility per sqrt(year), >= 0.
    pub volatility: f64,
    /// Time to expiry in years, > 0.
    pub expiry: f64,
}

impl OptionSpec {
    pub fn new(kind: OptionKind, strike: f64, rate: f64, volatility: f64, expiry: f64) -> Result<Self> {
        let spec = OptionSpec { kind, strike, rate, volatility, expiry };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.strike.is_finite() && self.strike > 0.0) {
            return Err(Error::domain("strike", format!("must be finite and > 0, got {}", self.strike)));
        }
        if !(self.expiry.is_finite() && self.expiry > 0.0) {
            return Err(Error::domain("expiry", format!("must be finite and > 0, got {}", self.expiry)));
        }
        if !(self.volatility.is_finite() && self.volatility >= 0.0) {
            return Err(Error::domain("volatility", format!("must be finite and >= 0, got {}", self.volatility)));
        }
        if !(self.rate.is_finite() && self.rate >= 0.0) {
            return Err(Error::domain("rate", format!("must be finite and >= 0, got {}", self.rate)));
        }
        Ok(())
    }

    /// Strike discounted from expiry back to calendar time `time`.
    pub fn discounted_strike(&self, time: f64) -> f64 {
        self.strike * (-self.rate * (self.expiry - time)).exp()
    }

    pub fn with_kind(self, kind: OptionKind) -> Self {
        OptionSpec { kind, ..self }
    }
}

/// Spot price and calendar time at which an option is valued.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketQuery {
    pub spot: f64,
    /// Calendar time in years, `0 <= time <= expiry`.
    pub time: f64,
}

impl MarketQuery {
    pub fn new(spot: f64, time: f64) -> Self {
        MarketQuery { spot, time }
    }

    pub fn validate(&self, spec: &OptionSpec) -> Result<()> {
        if !(self.spot.is_finite() && self.spot >= 0.0) {
            return Err(Error::domain("spot", format!("must be finite and >= 0, got {}", self.spot)));
        }
        if !(self.time.is_finite() && self.time >= 0.0 && self.time <= spec.expiry) {
            return Err(Error::domain("time", format!("must lie in [0, {}], got {}", spec.expiry, self.time)));
        }
        Ok(())
    }

    pub fn time_to_expiry(&self, spec: &OptionSpec) -> f64 {
        spec.expiry - self.time
    }
}

/// Standard normal cumulative distribution function.
///
/// Evaluated as `erfc(-x / sqrt 2) / 2` using the FreeBSD/musl rational
/// approximations of `erfc`, which are accurate to about one ulp and keep
/// relative accuracy deep in the lower tail.
pub fn norm_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("x", format!("normal CDF argument must be finite, got {x}")));
    }
    Ok(0.5 * libm::erfc(-x * FRAC_1_SQRT_2))
}

// Internal variant for arguments already known to be finite.
fn ncdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

// Deep out of the money both terms of the price are subnormal and their
// difference is pure rounding noise; report it as zero.
fn flush_subnormal(v: f64) -> f64 {
    if v.abs() < f64::MIN_POSITIVE {
        0.0
    } else {
        v
    }
}

/// `(d1, d2)` of the closed-form solution.
///
/// Rejects the degenerate points `spot == 0`, `volatility == 0` and
/// `time == expiry`; the price functions handle those through their limits.
pub fn d1_d2(spec: &OptionSpec, q: &MarketQuery) -> Result<(f64, f64)> {
    spec.validate()?;
    q.validate(spec)?;
    let tau = q.time_to_expiry(spec);
    if q.spot == 0.0 {
        return Err(Error::Degenerate("d1/d2 undefined at spot = 0".into()));
    }
    if spec.volatility == 0.0 {
        return Err(Error::Degenerate("d1/d2 undefined at volatility = 0".into()));
    }
    if tau <= 0.0 {
        return Err(Error::Degenerate("d1/d2 undefined at expiry".into()));
    }
    let vol_sqrt = spec.volatility * tau.sqrt();
    let d1 = ((q.spot / spec.strike).ln() + (spec.rate + 0.5 * spec.volatility * spec.volatility) * tau) / vol_sqrt;
    Ok((d1, d1 - vol_sqrt))
}

pub fn payoff(kind: OptionKind, spot: f64, strike: f64) -> f64 {
    match kind {
        OptionKind::Call => (spot - strike).max(0.0),
        OptionKind::Put => (strike - spot).max(0.0),
    }
}

/// Value of a European call, `S N(d1) - E e^{-r(T-t)} N(d2)`.
///
/// At expiry this is the payoff, at `spot == 0` it is zero, and with zero
/// volatility it is the discounted intrinsic value `max(S - E e^{-r(T-t)}, 0)`.
pub fn call_price(spec: &OptionSpec, q: &MarketQuery) -> Result<f64> {
    spec.validate()?;
    q.validate(spec)?;
    let s = q.spot;
    if q.time_to_expiry(spec) <= 0.0 {
        return Ok(payoff(OptionKind::Call, s, spec.strike));
    }
    let disc = spec.discounted_strike(q.time);
    let lower = (s - disc).max(0.0);
    if s == 0.0 || spec.volatility == 0.0 {
        return Ok(lower);
    }
    let (d1, d2) = d1_d2(spec, q)?;
    let c = flush_subnormal(s * ncdf(d1) - disc * ncdf(d2));
    Ok(c.clamp(lower, s))
}

/// Value of a European put, `E e^{-r(T-t)} N(-d2) - S N(-d1)`.
pub fn put_price(spec: &OptionSpec, q: &MarketQuery) -> Result<f64> {
    spec.validate()?;
    q.validate(spec)?;
    let s = q.spot;
    if q.time_to_expiry(spec) <= 0.0 {
        return Ok(payoff(OptionKind::Put, s, spec.strike));
    }
    let disc = spec.discounted_strike(q.time);
    let lower = (disc - s).max(0.0);
    if s == 0.0 || spec.volatility == 0.0 {
        return Ok(lower);
    }
    let (d1, d2) = d1_d2(spec, q)?;
    let p = flush_subnormal(disc * ncdf(-d2) - s * ncdf(-d1));
    Ok(p.clamp(lower, disc))
}

/// Dispatches on `spec.kind`.
pub fn price(spec: &OptionSpec, q: &MarketQuery) -> Result<f64> {
    match spec.kind {
        OptionKind::Call => call_price(spec, q),
        OptionKind::Put => put_price(spec, q),
    }
}

/// `C - P - (S - E e^{-r(T-t)})`, zero for exact prices.
pub fn parity_residual(call: f64, put: f64, spot: f64, discounted_strike: f64) -> f64 {
    call - put - (spot - discounted_strike)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: OptionKind, strike: f64, rate: f64, vol: f64, expiry: f64) -> OptionSpec {
        OptionSpec::new(kind, strike, rate, vol, expiry).unwrap()
    }

    #[test]
    fn norm_cdf_symmetry() {
        assert_eq!(norm_cdf(0.0).unwrap(), 0.5);
        for &x in &[0.1, 0.5, 1.0, 2.5, 4.0, 7.9] {
            let s = norm_cdf(x).unwrap() + norm_cdf(-x).unwrap();
            assert!((s - 1.0).abs() <= 1e-14, "x={x}: {s}");
        }
    }

    #[test]
    fn norm_cdf_rejects_non_finite() {
        assert!(norm_cdf(f64::NAN).is_err());
        assert!(norm_cdf(f64::INFINITY).is_err());
    }

    #[test]
    fn d1_d2_at_the_money_zero_rate() {
        let s = spec(OptionKind::Call, 10.0, 0.0, 0.2, 1.0);
        let (d1, d2) = d1_d2(&s, &MarketQuery::new(10.0, 0.0)).unwrap();
        assert!((d1 - 0.1).abs() < 1e-15);
        assert!((d2 + 0.1).abs() < 1e-15);
    }

    #[test]
    fn d1_d2_degenerate_inputs() {
        let s = spec(OptionKind::Call, 10.0, 0.05, 0.2, 1.0);
        assert!(matches!(d1_d2(&s, &MarketQuery::new(0.0, 0.0)), Err(Error::Degenerate(_))));
        assert!(matches!(d1_d2(&s, &MarketQuery::new(10.0, 1.0)), Err(Error::Degenerate(_))));
        let flat = spec(OptionKind::Call, 10.0, 0.05, 0.0, 1.0);
        assert!(matches!(d1_d2(&flat, &MarketQuery::new(10.0, 0.0)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn boundary_and_terminal_values() {
        let c = spec(OptionKind::Call, 10.0, 0.1, 0.4, 0.5);
        assert_eq!(call_price(&c, &MarketQuery::new(0.0, 0.0)).unwrap(), 0.0);
        assert_eq!(call_price(&c, &MarketQuery::new(12.0, 0.5)).unwrap(), 2.0);

        let p = spec(OptionKind::Put, 100.0, 0.25, 0.4, 0.5);
        let at_zero = put_price(&p, &MarketQuery::new(0.0, 0.0)).unwrap();
        assert!((at_zero - 100.0 * (-0.125f64).exp()).abs() < 1e-12);
        assert!((at_zero - 88.2497).abs() < 1e-4);
        assert_eq!(put_price(&p, &MarketQuery::new(120.0, 0.5)).unwrap(), 0.0);
    }

    #[test]
    fn payoff_cases() {
        assert_eq!(payoff(OptionKind::Call, 12.0, 10.0), 2.0);
        assert_eq!(payoff(OptionKind::Put, 12.0, 10.0), 0.0);
        for e in [0.5, 10.0, 1e4] {
            assert_eq!(payoff(OptionKind::Call, 0.0, e), 0.0);
        }
    }

    #[test]
    fn deep_out_of_the_money_is_exactly_zero() {
        // both terms are a few subnormal ulps here
        let p =
            spec(OptionKind::Put, 141.84134522147187, 0.005466126589225303, 0.057298902097960264, 0.13306526749632766);
        assert_eq!(put_price(&p, &MarketQuery::new(316.0555482044554, 0.0)).unwrap(), 0.0);
        assert_eq!(put_price(&p, &MarketQuery::new(316.8220692180447, 0.0)).unwrap(), 0.0);
        let c = p.with_kind(OptionKind::Call);
        assert_eq!(call_price(&c, &MarketQuery::new(20.0, 0.0)).unwrap(), 0.0);
    }

    #[test]
    fn zero_volatility_is_discounted_intrinsic() {
        let c = spec(OptionKind::Call, 10.0, 0.1, 0.0, 1.0);
        let v = call_price(&c, &MarketQuery::new(10.0, 0.0)).unwrap();
        assert!((v - (10.0 - 10.0 * (-0.1f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn invalid_spec_is_rejected() {
        assert!(OptionSpec::new(OptionKind::Call, 0.0, 0.1, 0.2, 1.0).is_err());
        assert!(OptionSpec::new(OptionKind::Call, 10.0, -0.1, 0.2, 1.0).is_err());
        assert!(OptionSpec::new(OptionKind::Call, 10.0, 0.1, -0.2, 1.0).is_err());
        assert!(OptionSpec::new(OptionKind::Call, 10.0, 0.1, 0.2, 0.0).is_err());
        let c = spec(OptionKind::Call, 10.0, 0.1, 0.2, 1.0);
        assert!(call_price(&c, &MarketQuery::new(-1.0, 0.0)).is_err());
        assert!(call_price(&c, &MarketQuery::new(1.0, 1.5)).is_err());
    }
}
