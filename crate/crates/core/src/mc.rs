//! Geometric Brownian motion: sample paths and a risk-neutral Monte Carlo
//! price estimator.
//!
//! Normal variates come from `rand_distr::StandardNormal` (ziggurat) driven by
//! ChaCha8. Paths are generated in fixed-size blocks; block `b` draws from
//! stream `b` of the generator seeded with the user seed. The estimate is a
//! function of `(seed, n_paths)` only: it does not depend on how many threads
//! the blocks are spread over, since per-block statistics are merged in block
//! order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::analytic::{payoff, OptionSpec};
use crate::error::{Error, Result};

/// Paths per independently seeded block.
pub const BLOCK_PATHS: usize = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GbmParams {
    /// Real-world drift; only used for path realisations.
    pub drift: f64,
    pub volatility: f64,
    pub s0: f64,
}

impl GbmParams {
    pub fn new(drift: f64, volatility: f64, s0: f64) -> Result<Self> {
        if !drift.is_finite() {
            return Err(Error::domain("drift", "must be finite"));
        }
        if !(volatility.is_finite() && volatility >= 0.0) {
            return Err(Error::domain("volatility", format!("must be finite and >= 0, got {volatility}")));
        }
        if !(s0.is_finite() && s0 > 0.0) {
            return Err(Error::domain("s0", format!("must be finite and > 0, got {s0}")));
        }
        Ok(GbmParams { drift, volatility, s0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub seed: u64,
}

/// One realisation with exact lognormal steps; `n_steps + 1` prices
/// starting at `s0`.
pub fn simulate_path(params: &GbmParams, horizon: f64, n_steps: usize, seed: u64) -> Result<Vec<f64>> {
    if n_steps < 1 {
        return Err(Error::domain("n_steps", "need at least one step"));
    }
    if !(horizon.is_finite() && horizon > 0.0) {
        return Err(Error::domain("horizon", format!("must be finite and > 0, got {horizon}")));
    }
    let dt = horizon / n_steps as f64;
    let drift = (params.drift - 0.5 * params.volatility * params.volatility) * dt;
    let diffusion = params.volatility * dt.sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut path = Vec::with_capacity(n_steps + 1);
    let mut s = params.s0;
    path.push(s);
    for _ in 0..n_steps {
        let z: f64 = rng.sample(StandardNormal);
        s *= (drift + diffusion * z).exp();
        path.push(s);
    }
    Ok(path)
}

/// Running mean and sum of squared deviations (Welford / Chan).
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn merge(self, other: Moments) -> Moments {
        if self.count == 0 {
            return other;
        }
        if other.count == 0 {
            return self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.count as f64 / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * other.count as f64 / count as f64);
        Moments { count, mean, m2 }
    }
}

/// Discounted risk-neutral expectation `e^{-rT} E[g(S_T)]` of an arbitrary
/// terminal payoff `g`, with `S_T = s0 exp((r - sigma^2/2) T + sigma sqrt(T) Z)`.
pub fn mc_expectation(
    s0: f64,
    rate: f64,
    volatility: f64,
    expiry: f64,
    n_paths: usize,
    seed: u64,
    g: impl Fn(f64) -> f64 + Sync,
) -> Result<McEstimate> {
    GbmParams::new(rate, volatility, s0)?;
    if n_paths < 2 {
        return Err(Error::domain("n_paths", format!("need at least 2 paths, got {n_paths}")));
    }
    if !(expiry.is_finite() && expiry > 0.0) {
        return Err(Error::domain("expiry", format!("must be finite and > 0, got {expiry}")));
    }
    let drift = (rate - 0.5 * volatility * volatility) * expiry;
    let diffusion = volatility * expiry.sqrt();
    let n_blocks = n_paths.div_ceil(BLOCK_PATHS);

    let blocks: Vec<Moments> = (0..n_blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let count = BLOCK_PATHS.min(n_paths - b * BLOCK_PATHS);
            let mut acc = Moments::default();
            for _ in 0..count {
                let z: f64 = rng.sample(StandardNormal);
                acc.push(g(s0 * (drift + diffusion * z).exp()));
            }
            acc
        })
        .collect();
    let total = blocks.into_iter().fold(Moments::default(), Moments::merge);

    let discount = (-rate * expiry).exp();
    let variance = total.m2 / (total.count - 1) as f64;
    Ok(McEstimate {
        mean: discount * total.mean,
        std_error: discount * (variance / total.count as f64).sqrt(),
        n_paths,
        seed,
    })
}

/// Monte Carlo price of a European option under risk-neutral drift `r`.
pub fn mc_price(spec: &OptionSpec, s0: f64, n_paths: usize, seed: u64) -> Result<McEstimate> {
    spec.validate()?;
    let kind = spec.kind;
    let strike = spec.strike;
    mc_expectation(s0, spec.rate, spec.volatility, spec.expiry, n_paths, seed, move |s| payoff(kind, s, strike))
}
