//! Command-line front end: argument model, dispatch and CSV writers.
//!
//! Every numeric column is written as `{:.16e}`, which carries 17 significant
//! digits and therefore round-trips `f64` exactly.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::analytic::{self, MarketQuery, OptionKind, OptionSpec};
use crate::bspricer::{
    cn_bs_solve, convergence_study, ConvergenceConfig, ConvergenceReport, PriceSurface, SpatialGrid, TimeGrid,
};
use crate::error::Error;
use crate::heatkernel::price_via_heat_kernel;
use crate::mc::{mc_price, simulate_path, GbmParams};
use crate::stability::{stability_table, StabilityRow};

pub const SURFACE_HEADER: &str = "S,tau,value";
pub const CONVERGENCE_HEADER: &str = "M,N,h,dt,error,order";
pub const STABILITY_HEADER: &str = "C,theta,A_explicit,A_cn";
pub const PATHS_HEADER: &str = "step,time,price";
pub const VOLSWEEP_HEADER: &str = "sigma,price_analytic,price_pde,abs_diff";
pub const PRICE_HEADER: &str = "engine,price,std_error";
pub const MC_HEADER: &str = "mean,std_error,n_paths,seed";

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_GATE: u8 = 4;

const HEAT_KERNEL_TOL: f64 = 1e-10;

#[derive(Debug, Parser)]
#[command(name = "cnbs", version, about = "Crank-Nicolson Black-Scholes pricing with independent cross-checks")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Value one option with one or all engines.
    Price(PriceArgs),
    /// Write the full finite-difference price surface as CSV.
    Surface(SurfaceArgs),
    /// Grid-refinement study against the closed form.
    Converge(ConvergeArgs),
    /// Amplification factors of the explicit and Crank-Nicolson schemes.
    Stability(StabilityArgs),
    /// Monte Carlo price estimate.
    Mc(McArgs),
    /// One simulated GBM realisation.
    Paths(PathsArgs),
    /// Closed form vs finite differences over a volatility grid.
    Volsweep(VolsweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Call,
    Put,
}

impl From<KindArg> for OptionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Call => OptionKind::Call,
            KindArg::Put => OptionKind::Put,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Analytic,
    Pde,
    Heatkernel,
    Mc,
    All,
}

#[derive(Debug, Clone, Args)]
pub struct OptionArgs {
    #[arg(long, value_enum, default_value = "call")]
    pub kind: KindArg,
    #[arg(long, allow_negative_numbers = true)]
    pub strike: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub rate: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub vol: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub expiry: f64,
}

impl OptionArgs {
    fn spec(&self) -> Result<OptionSpec, CliError> {
        Ok(OptionSpec::new(self.kind.into(), self.strike, self.rate, self.vol, self.expiry)?)
    }
}

#[derive(Debug, Clone, Args)]
pub struct GridArgs {
    /// Upper truncation of the asset axis [default: 4 * strike].
    #[arg(long)]
    pub smax: Option<f64>,
    #[arg(long, default_value_t = 400)]
    pub mspace: usize,
    #[arg(long, default_value_t = 400)]
    pub ntime: usize,
    /// Shift the node count so the strike falls halfway between two nodes.
    #[arg(long)]
    pub strike_midway: bool,
}

impl GridArgs {
    fn s_max(&self, spec: &OptionSpec) -> f64 {
        self.smax.unwrap_or(4.0 * spec.strike)
    }

    fn grids(&self, spec: &OptionSpec) -> Result<(SpatialGrid, TimeGrid), CliError> {
        let s_max = self.s_max(spec);
        if !(s_max.is_finite() && s_max > spec.strike) {
            return Err(CliError::validation(format!("invalid smax: {s_max} must exceed the strike {}", spec.strike)));
        }
        let grid = if self.strike_midway {
            SpatialGrid::strike_midway(s_max, self.mspace, spec.strike)?
        } else {
            SpatialGrid::new(s_max, self.mspace)?
        };
        Ok((grid, TimeGrid::new(spec.expiry, self.ntime)?))
    }
}

#[derive(Debug, Clone, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub option: OptionArgs,
    /// Spot price [default: strike].
    #[arg(long, allow_negative_numbers = true)]
    pub spot: Option<f64>,
    #[arg(long, value_enum, default_value = "all")]
    pub engine: Engine,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value_t = 1_000_000)]
    pub npaths: usize,
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SurfaceArgs {
    #[command(flatten)]
    pub option: OptionArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Output file [default: stdout].
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub option: OptionArgs,
    /// Upper truncation of the asset axis [default: 4 * strike].
    #[arg(long)]
    pub smax: Option<f64>,
    /// Coarsest number of space intervals.
    #[arg(long, default_value_t = 100)]
    pub mspace: usize,
    /// Coarsest number of time steps.
    #[arg(long, default_value_t = 100)]
    pub ntime: usize,
    #[arg(long)]
    pub strike_midway: bool,
    #[arg(long, default_value_t = 3)]
    pub levels: usize,
    /// Exit with status 4 when the fitted order falls below this value.
    #[arg(long, default_value_t = 1.5)]
    pub min_order: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    /// Mesh ratios C = D dt / h^2 to tabulate.
    #[arg(long, value_delimiter = ',', default_values_t = [0.25, 0.5, 0.6, 1.0, 10.0, 100.0])]
    pub c_values: Vec<f64>,
    /// Number of wavenumber samples theta = j pi / steps, j = 1..=steps.
    #[arg(long, default_value_t = 8)]
    pub theta_steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub option: OptionArgs,
    /// Spot price [default: strike].
    #[arg(long, allow_negative_numbers = true)]
    pub spot: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub npaths: usize,
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct PathsArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub spot: f64,
    /// Real-world drift mu.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub drift: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub vol: f64,
    /// Horizon in years.
    #[arg(long, allow_negative_numbers = true)]
    pub expiry: f64,
    #[arg(long, default_value_t = 252)]
    pub nsteps: usize,
    #[arg(long, default_value_t = 20_240_601)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct VolsweepArgs {
    #[arg(long, value_enum, default_value = "call")]
    pub kind: KindArg,
    #[arg(long, allow_negative_numbers = true)]
    pub strike: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub rate: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub expiry: f64,
    /// Spot price [default: strike].
    #[arg(long, allow_negative_numbers = true)]
    pub spot: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub vol_from: f64,
    #[arg(long, default_value_t = 1.0)]
    pub vol_to: f64,
    #[arg(long, default_value_t = 20)]
    pub vol_steps: usize,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure carrying the process exit status.
#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError { code: EXIT_VALIDATION, message: message.into() }
    }

    fn category(&self) -> &'static str {
        match self.code {
            EXIT_VALIDATION => "validation",
            EXIT_GATE => "gate",
            _ => "numerical",
        }
    }

    /// Single line: `error[<category>]: <message>`.
    pub fn render(&self) -> String {
        format!("error[{}]: {}", self.category(), self.message.replace('\n', " "))
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = if e.is_validation() { EXIT_VALIDATION } else { EXIT_NUMERICAL };
        CliError { code, message: e.to_string() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

fn io_err(path: &Path, source: io::Error) -> CliError {
    Error::Io { path: path.to_path_buf(), source }.into()
}

pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Runs `f` against the file at `out`, or against `stdout` when `out` is `None`.
fn with_output(
    out: Option<&Path>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> io::Result<()>,
) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| io_err(path, e))?;
            let mut w = BufWriter::new(file);
            f(&mut w).and_then(|_| w.flush()).map_err(|e| io_err(path, e))
        }
        None => f(stdout).map_err(|e| io_err(Path::new("<stdout>"), e)),
    }
}

pub fn write_surface<W: Write + ?Sized>(surface: &PriceSurface, w: &mut W) -> io::Result<()> {
    writeln!(w, "{SURFACE_HEADER}")?;
    for (i, s) in surface.s_axis.iter().enumerate() {
        for (j, tau) in surface.tau_axis.iter().enumerate() {
            writeln!(w, "{},{},{}", fmt_num(*s), fmt_num(*tau), fmt_num(surface.value(i, j)))?;
        }
    }
    Ok(())
}

/// Writes `S,tau,value` rows, node-major then time, `(M+1)(N+1)` rows.
pub fn write_surface_csv(surface: &PriceSurface, path: &Path) -> Result<(), CliError> {
    with_output(Some(path), &mut io::sink(), |w| write_surface(surface, w))
}

pub fn write_convergence<W: Write + ?Sized>(report: &ConvergenceReport, w: &mut W) -> io::Result<()> {
    writeln!(w, "{CONVERGENCE_HEADER}")?;
    for r in &report.rows {
        let order = r.order.map(fmt_num).unwrap_or_default();
        writeln!(w, "{},{},{},{},{},{}", r.m, r.n, fmt_num(r.h), fmt_num(r.dt), fmt_num(r.error), order)?;
    }
    Ok(())
}

pub fn write_stability<W: Write + ?Sized>(rows: &[StabilityRow], w: &mut W) -> io::Result<()> {
    writeln!(w, "{STABILITY_HEADER}")?;
    for r in rows {
        writeln!(w, "{},{},{},{}", fmt_num(r.c_ratio), fmt_num(r.theta), fmt_num(r.a_explicit), fmt_num(r.a_cn))?;
    }
    Ok(())
}

pub fn write_path<W: Write + ?Sized>(path: &[f64], dt: f64, w: &mut W) -> io::Result<()> {
    writeln!(w, "{PATHS_HEADER}")?;
    for (j, s) in path.iter().enumerate() {
        writeln!(w, "{},{},{}", j, fmt_num(j as f64 * dt), fmt_num(*s))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub sigma: f64,
    pub price_analytic: f64,
    pub price_pde: f64,
}

pub fn write_volsweep<W: Write + ?Sized>(rows: &[SweepRow], w: &mut W) -> io::Result<()> {
    writeln!(w, "{VOLSWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            fmt_num(r.sigma),
            fmt_num(r.price_analytic),
            fmt_num(r.price_pde),
            fmt_num((r.price_analytic - r.price_pde).abs())
        )?;
    }
    Ok(())
}

fn resolve_spot(spot: Option<f64>, spec: &OptionSpec) -> Result<f64, CliError> {
    let s = spot.unwrap_or(spec.strike);
    if !(s.is_finite() && s >= 0.0) {
        return Err(CliError::validation(format!("invalid spot: must be finite and >= 0, got {s}")));
    }
    Ok(s)
}

fn check_spot_on_grid(spot: f64, grid: &SpatialGrid) -> Result<(), CliError> {
    if spot > grid.s_max {
        return Err(CliError::validation(format!("invalid spot: {spot} exceeds smax {}", grid.s_max)));
    }
    Ok(())
}

/// Volatilities `from + k (to - from) / (steps - 1)`, `k = 0..steps`.
pub fn sweep_grid(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if steps == 0 {
        return Err(CliError::validation("invalid vol-steps: need at least one point"));
    }
    if !(from.is_finite() && to.is_finite() && from >= 0.0 && from <= to) {
        return Err(CliError::validation(format!(
            "invalid volatility bounds: need 0 <= vol-from <= vol-to, got {from}..{to}"
        )));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let d = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|k| if k + 1 == steps { to } else { from + k as f64 * d }).collect())
}

/// Dispatches a parsed configuration. Tabular output goes to `--out` when
/// given, otherwise to `stdout`; remarks go to `stderr`.
pub fn run(config: &RunConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match &config.command {
        Command::Price(a) => run_price(a, stdout),
        Command::Surface(a) => {
            let spec = a.option.spec()?;
            let (grid, tgrid) = a.grid.grids(&spec)?;
            let surface = cn_bs_solve(&spec, &grid, &tgrid)?;
            with_output(a.out.as_deref(), stdout, |w| write_surface(&surface, w))
        }
        Command::Converge(a) => run_converge(a, stdout, stderr),
        Command::Stability(a) => {
            let rows = stability_table(&a.c_values, a.theta_steps)?;
            with_output(a.out.as_deref(), stdout, |w| write_stability(&rows, w))
        }
        Command::Mc(a) => {
            let spec = a.option.spec()?;
            let spot = resolve_spot(a.spot, &spec)?;
            let est = mc_price(&spec, spot, a.npaths, a.seed)?;
            writeln!(stdout, "{MC_HEADER}")
                .and_then(|_| {
                    writeln!(stdout, "{},{},{},{}", fmt_num(est.mean), fmt_num(est.std_error), est.n_paths, est.seed)
                })
                .map_err(|e| io_err(Path::new("<stdout>"), e))
        }
        Command::Paths(a) => {
            let params = GbmParams::new(a.drift, a.vol, a.spot)?;
            let path = simulate_path(&params, a.expiry, a.nsteps, a.seed)?;
            let dt = a.expiry / a.nsteps as f64;
            with_output(a.out.as_deref(), stdout, |w| write_path(&path, dt, w))
        }
        Command::Volsweep(a) => run_volsweep(a, stdout),
    }
}

fn run_price(a: &PriceArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let spec = a.option.spec()?;
    let spot = resolve_spot(a.spot, &spec)?;
    let q = MarketQuery::new(spot, 0.0);
    let wants = |e: Engine| a.engine == e || a.engine == Engine::All;

    let mut rows: Vec<(&str, f64, Option<f64>)> = Vec::new();
    if wants(Engine::Analytic) {
        rows.push(("analytic", analytic::price(&spec, &q)?, None));
    }
    if wants(Engine::Pde) {
        let (grid, tgrid) = a.grid.grids(&spec)?;
        check_spot_on_grid(spot, &grid)?;
        let surface = cn_bs_solve(&spec, &grid, &tgrid)?;
        rows.push(("pde", surface.price_at(spot, 0.0)?, None));
    }
    if wants(Engine::Heatkernel) {
        rows.push(("heatkernel", price_via_heat_kernel(&spec, &q, HEAT_KERNEL_TOL)?, None));
    }
    if wants(Engine::Mc) {
        let est = mc_price(&spec, spot, a.npaths, a.seed)?;
        rows.push(("mc", est.mean, Some(est.std_error)));
    }

    let mut text = format!("{PRICE_HEADER}\n");
    for (engine, price, se) in rows {
        text.push_str(&format!("{engine},{},{}\n", fmt_num(price), se.map(fmt_num).unwrap_or_default()));
    }
    out.write_all(text.as_bytes()).map_err(|e| io_err(Path::new("<stdout>"), e))
}

fn run_converge(a: &ConvergeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let spec = a.option.spec()?;
    if a.levels < 2 {
        return Err(CliError::validation(format!("invalid levels: need at least 2, got {}", a.levels)));
    }
    if !a.min_order.is_finite() {
        return Err(CliError::validation("invalid min-order: must be finite"));
    }
    let mut cfg = ConvergenceConfig::for_spec(&spec);
    if let Some(s) = a.smax {
        cfg.s_max = s;
    }
    if !(cfg.s_max.is_finite() && cfg.s_max > spec.strike) {
        return Err(CliError::validation(format!(
            "invalid smax: {} must exceed the strike {}",
            cfg.s_max, spec.strike
        )));
    }
    cfg.strike_midway = a.strike_midway;
    let report = convergence_study(&spec, a.mspace, a.ntime, a.levels, &cfg)?;
    with_output(a.out.as_deref(), stdout, |w| write_convergence(&report, w))?;

    let fitted = report.fitted_order().unwrap_or(f64::NAN);
    let _ = writeln!(stderr, "fitted order {fitted:.4} (gate {:.4})", a.min_order);
    if fitted.is_nan() || fitted < a.min_order {
        return Err(CliError {
            code: EXIT_GATE,
            message: format!("fitted order {fitted:.4} below min-order {}", a.min_order),
        });
    }
    Ok(())
}

/// Closed form and Crank-Nicolson prices over the sweep grid, in grid order.
pub fn volsweep_rows(
    base: &OptionSpec,
    spot: f64,
    grid_args: &GridArgs,
    sigmas: &[f64],
) -> Result<Vec<SweepRow>, CliError> {
    let q = MarketQuery::new(spot, 0.0);
    let (grid, tgrid) = grid_args.grids(base)?;
    check_spot_on_grid(spot, &grid)?;
    sigmas
        .par_iter()
        .map(|&sigma| {
            let spec = OptionSpec::new(base.kind, base.strike, base.rate, sigma, base.expiry)?;
            let price_analytic = analytic::price(&spec, &q)?;
            let price_pde = cn_bs_solve(&spec, &grid, &tgrid)?.price_at(spot, 0.0)?;
            Ok(SweepRow { sigma, price_analytic, price_pde })
        })
        .collect()
}

fn run_volsweep(a: &VolsweepArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let sigmas = sweep_grid(a.vol_from, a.vol_to, a.vol_steps)?;
    let base = OptionSpec::new(a.kind.into(), a.strike, a.rate, sigmas[0], a.expiry)?;
    let spot = resolve_spot(a.spot, &base)?;
    let rows = volsweep_rows(&base, spot, &a.grid, &sigmas)?;
    with_output(a.out.as_deref(), out, |w| write_volsweep(&rows, w))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> RunConfig {
        RunConfig::try_parse_from(std::iter::once("cnbs").chain(args.iter().copied())).unwrap()
    }

    fn run_capture(args: &[&str]) -> (Result<(), CliError>, String) {
        let cfg = parse(args);
        let mut out = Vec::new();
        let mut err = Vec::new();
        let res = run(&cfg, &mut out, &mut err);
        (res, String::from_utf8(out).unwrap())
    }

    #[test]
    fn sweep_grid_matches_twentieths() {
        let g = sweep_grid(0.05, 1.0, 20).unwrap();
        assert_eq!(g.len(), 20);
        for (k, s) in g.iter().enumerate() {
            assert!((s - 0.05 * (k + 1) as f64).abs() < 1e-12);
        }
        assert!(sweep_grid(0.5, 0.1, 3).is_err());
        assert!(sweep_grid(0.1, 0.5, 0).is_err());
    }

    #[test]
    fn invalid_strike_is_validation_error() {
        let (res, _) = run_capture(&["price", "--strike", "-1", "--rate", "0.1", "--vol", "0.2", "--expiry", "1"]);
        let e = res.unwrap_err();
        assert_eq!(e.code, EXIT_VALIDATION);
        assert!(!e.render().contains('\n'));
        assert!(e.render().starts_with("error[validation]:"));
    }

    #[test]
    fn stability_output_shape() {
        let (res, out) = run_capture(&["stability", "--c-values", "0.5,1", "--theta-steps", "4"]);
        res.unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], STABILITY_HEADER);
        assert_eq!(lines.len(), 9);
    }

    #[test]
    fn spot_beyond_smax_rejected() {
        let (res, _) = run_capture(&[
            "price", "--strike", "10", "--rate", "0.1", "--vol", "0.4", "--expiry", "0.5", "--spot", "50", "--engine",
            "pde",
        ]);
        assert_eq!(res.unwrap_err().code, EXIT_VALIDATION);
    }
}
