//! European vanilla option pricing on the Black-Scholes PDE.
//!
//! The workhorse is a Crank-Nicolson solver in asset-price coordinates
//! ([`bspricer`]). Three independent routes cross-check it:
//!
//! * [`analytic`]: closed-form valuation and put-call parity,
//! * [`heatkernel`]: reduction to the heat equation and numerical
//!   convolution with the Gaussian kernel,
//! * [`mc`]: risk-neutral Monte Carlo under geometric Brownian motion.
//!
//! [`fdcore`] holds the difference operators, the Thomas tridiagonal solver
//! and a Crank-Nicolson solver for the model heat problem, and
//! [`stability`] the Von Neumann amplification factors.

pub mod analytic;
pub mod bspricer;
pub mod cli;
pub mod error;
pub mod fdcore;
pub mod heatkernel;
pub mod mc;
pub mod stability;

pub use analytic::{call_price, d1_d2, norm_cdf, payoff, put_price, MarketQuery, OptionKind, OptionSpec};
pub use bspricer::{
    boundary_values, build_bs_operator, cn_bs_solve, convergence_study, terminal_payoff, ConvergenceReport,
    ConvergenceRow, PriceSurface, SpatialGrid, TimeGrid,
};
pub use error::{Error, Result};
pub use fdcore::{thomas_solve, GridFunction, MeshParams, Tridiagonal};
