//! C ABI over the `cnbs` pricing library.
//!
//! Every function returns a [`CnbsStatus`] (or a plain number where failure is
//! impossible) and writes results through out-pointers. Panics are caught at
//! the boundary and reported as `CNBS_STATUS_PANIC`. The text of the most
//! recent failure on the calling thread is available from
//! [`cnbs_last_error_message`].
//!
//! Price surfaces are returned as opaque [`CnbsSurface`] handles owned by the
//! caller and released with [`cnbs_surface_free`]. The header is regenerated
//! into `include/cnbs.h` on every build.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cnbs::analytic::{self, MarketQuery, OptionKind, OptionSpec};
use cnbs::heatkernel::price_via_heat_kernel;
use cnbs::mc::mc_price;
use cnbs::stability::{amp_cn, amp_explicit};
use cnbs::{cn_bs_solve, Error, PriceSurface, SpatialGrid, TimeGrid};

pub const CNBS_CALL: i32 = 0;
pub const CNBS_PUT: i32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CnbsStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// An argument violates its documented domain.
    InvalidArgument = 2,
    /// A tridiagonal solve hit a zero pivot.
    Singular = 3,
    /// An index or evaluation point lies outside the surface.
    OutOfRange = 4,
    /// The library panicked; the call had no effect.
    Panic = 5,
}

/// Contract terms. `kind` is `CNBS_CALL` or `CNBS_PUT`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CnbsOptionSpec {
    pub kind: i32,
    pub strike: f64,
    pub rate: f64,
    pub volatility: f64,
    pub expiry: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CnbsMcEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_paths: u64,
    pub seed: u64,
}

/// Opaque handle to a solved price surface.
pub struct CnbsSurface(PriceSurface);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(CnbsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::SingularPivot { .. } | Error::SingularStep { .. } => CnbsStatus::Singular,
            Error::OutOfRange { .. } => CnbsStatus::OutOfRange,
            _ => CnbsStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CnbsStatus::NullPointer, format!("{what} is null"))
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CnbsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            CnbsStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(_) => {
            set_last_error("panic inside cnbs");
            CnbsStatus::Panic
        }
    }
}

unsafe fn read_spec(spec: *const CnbsOptionSpec) -> Result<OptionSpec, Failure> {
    let s = spec.as_ref().ok_or_else(|| null("spec"))?;
    let kind = match s.kind {
        CNBS_CALL => OptionKind::Call,
        CNBS_PUT => OptionKind::Put,
        k => return Err(Failure(CnbsStatus::InvalidArgument, format!("invalid kind: {k}"))),
    };
    Ok(OptionSpec::new(kind, s.strike, s.rate, s.volatility, s.expiry)?)
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), Failure> {
    out.as_mut().map(|o| *o = value).ok_or_else(|| null("out"))
}

/// Closed-form price at `spot` and calendar `time`.
///
/// # Safety
/// `spec` must point to a valid `CnbsOptionSpec`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnbs_analytic_price(
    spec: *const CnbsOptionSpec,
    spot: f64,
    time: f64,
    out: *mut f64,
) -> CnbsStatus {
    guard(|| {
        let spec = read_spec(spec)?;
        write(out, analytic::price(&spec, &MarketQuery::new(spot, time))?)
    })
}

/// Price from the heat-kernel convolution with relative tolerance `tol`.
///
/// # Safety
/// As for `cnbs_analytic_price`.
#[no_mangle]
pub unsafe extern "C" fn cnbs_heat_kernel_price(
    spec: *const CnbsOptionSpec,
    spot: f64,
    time: f64,
    tol: f64,
    out: *mut f64,
) -> CnbsStatus {
    guard(|| {
        let spec = read_spec(spec)?;
        write(out, price_via_heat_kernel(&spec, &MarketQuery::new(spot, time), tol)?)
    })
}

/// Monte Carlo price at time 0. Deterministic in `(seed, n_paths)`.
///
/// # Safety
/// `spec` must point to a valid `CnbsOptionSpec`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnbs_mc_price(
    spec: *const CnbsOptionSpec,
    spot: f64,
    n_paths: u64,
    seed: u64,
    out: *mut CnbsMcEstimate,
) -> CnbsStatus {
    guard(|| {
        let spec = read_spec(spec)?;
        let n =
            usize::try_from(n_paths).map_err(|_| Failure(CnbsStatus::InvalidArgument, "n_paths too large".into()))?;
        let est = mc_price(&spec, spot, n, seed)?;
        write(out, CnbsMcEstimate { mean: est.mean, std_error: est.std_error, n_paths, seed })
    })
}

/// Crank-Nicolson amplification factor for mesh ratio `c` and wave angle `theta`.
#[no_mangle]
pub extern "C" fn cnbs_amp_cn(c: f64, theta: f64) -> f64 {
    amp_cn(c, theta)
}

/// Explicit-scheme amplification factor.
#[no_mangle]
pub extern "C" fn cnbs_amp_explicit(c: f64, theta: f64) -> f64 {
    amp_explicit(c, theta)
}

/// Solves on `[0, s_max]` with `n_space` intervals and `n_time` steps. With
/// `strike_midway` the node count is adjusted so the strike sits halfway
/// between two nodes. On success `*out` owns a new handle.
///
/// # Safety
/// `spec` must point to a valid `CnbsOptionSpec`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnbs_surface_solve(
    spec: *const CnbsOptionSpec,
    s_max: f64,
    n_space: usize,
    n_time: usize,
    strike_midway: bool,
    out: *mut *mut CnbsSurface,
) -> CnbsStatus {
    guard(|| {
        let spec = read_spec(spec)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let grid = if strike_midway {
            SpatialGrid::strike_midway(s_max, n_space, spec.strike)?
        } else {
            SpatialGrid::new(s_max, n_space)?
        };
        let surface = cn_bs_solve(&spec, &grid, &TimeGrid::new(spec.expiry, n_time)?)?;
        *out = Box::into_raw(Box::new(CnbsSurface(surface)));
        Ok(())
    })
}

/// Releases a handle from `cnbs_surface_solve`. Null is ignored.
///
/// # Safety
/// `surface` must be null or a live handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn cnbs_surface_free(surface: *mut CnbsSurface) {
    if !surface.is_null() {
        drop(Box::from_raw(surface));
    }
}

/// Number of space nodes (`rows`) and time levels (`cols`).
///
/// # Safety
/// `surface` must be a live handle; `rows` and `cols` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnbs_surface_dims(
    surface: *const CnbsSurface,
    rows: *mut usize,
    cols: *mut usize,
) -> CnbsStatus {
    guard(|| {
        let s = surface.as_ref().ok_or_else(|| null("surface"))?;
        if rows.is_null() || cols.is_null() {
            return Err(null("rows/cols"));
        }
        *rows = s.0.n_rows();
        *cols = s.0.n_cols();
        Ok(())
    })
}

/// Value at space node `i` and time level `j` (`j = 0` is expiry).
///
/// # Safety
/// `surface` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnbs_surface_value(
    surface: *const CnbsSurface,
    i: usize,
    j: usize,
    out: *mut f64,
) -> CnbsStatus {
    guard(|| {
        let s = &surface.as_ref().ok_or_else(|| null("surface"))?.0;
        if i >= s.n_rows() || j >= s.n_cols() {
            return Err(Failure(
                CnbsStatus::OutOfRange,
                format!("node ({i}, {j}) outside {}x{} surface", s.n_rows(), s.n_cols()),
            ));
        }
        write(out, s.value(i, j))
    })
}

/// Interpolated value at `spot` and calendar `time`.
///
/// # Safety
/// `surface` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cnbs_surface_price_at(
    surface: *const CnbsSurface,
    spot: f64,
    time: f64,
    out: *mut f64,
) -> CnbsStatus {
    guard(|| {
        let s = surface.as_ref().ok_or_else(|| null("surface"))?;
        write(out, s.0.price_at(spot, time)?)
    })
}

/// Copies all values, node-major (`buf[i * cols + j]`), into `buf`, which
/// must hold at least `rows * cols` doubles.
///
/// # Safety
/// `surface` must be a live handle; `buf` must be writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cnbs_surface_copy_values(
    surface: *const CnbsSurface,
    buf: *mut f64,
    len: usize,
) -> CnbsStatus {
    guard(|| {
        let s = &surface.as_ref().ok_or_else(|| null("surface"))?.0;
        if buf.is_null() {
            return Err(null("buf"));
        }
        let n = s.values.len();
        if len < n {
            return Err(Failure(CnbsStatus::OutOfRange, format!("buffer holds {len} values, need {n}")));
        }
        std::ptr::copy_nonoverlapping(s.values.as_ptr(), buf, n);
        Ok(())
    })
}

/// Static description of a status code; unknown codes get a generic text.
#[no_mangle]
pub extern "C" fn cnbs_status_message(status: i32) -> *const c_char {
    let s: &'static [u8] = match status {
        0 => b"ok\0",
        1 => b"null pointer argument\0",
        2 => b"invalid argument\0",
        3 => b"singular tridiagonal system\0",
        4 => b"out of range\0",
        5 => b"internal panic\0",
        _ => b"unknown status\0",
    };
    s.as_ptr().cast()
}

/// Detail of the last failure on this thread, or an empty string after a
/// success. Valid until the next cnbs call on the same thread.
#[no_mangle]
pub extern "C" fn cnbs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
