#ifndef CNBS_H
#define CNBS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

#define CNBS_CALL 0

#define CNBS_PUT 1

typedef enum CnbsStatus {
  CNBS_STATUS_OK = 0,
  // A required pointer argument was null.
  CNBS_STATUS_NULL_POINTER = 1,
  // An argument violates its documented domain.
  CNBS_STATUS_INVALID_ARGUMENT = 2,
  // A tridiagonal solve hit a zero pivot.
  CNBS_STATUS_SINGULAR = 3,
  // An index or evaluation point lies outside the surface.
  CNBS_STATUS_OUT_OF_RANGE = 4,
  // The library panicked; the call had no effect.
  CNBS_STATUS_PANIC = 5,
} CnbsStatus;

// Opaque handle to a solved price surface.
typedef struct CnbsSurface CnbsSurface;

// Contract terms. `kind` is `CNBS_CALL` or `CNBS_PUT`.
typedef struct CnbsOptionSpec {
  int32_t kind;
  double strike;
  double rate;
  double volatility;
  double expiry;
} CnbsOptionSpec;

typedef struct CnbsMcEstimate {
  double mean;
  double std_error;
  uint64_t n_paths;
  uint64_t seed;
} CnbsMcEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Closed-form price at `spot` and calendar `time`.
//
// # Safety
// `spec` must point to a valid `CnbsOptionSpec`; `out` must be writable.
enum CnbsStatus cnbs_analytic_price(const struct CnbsOptionSpec *spec,
                                    double spot,
                                    double time,
                                    double *out);

// Price from the heat-kernel convolution with relative tolerance `tol`.
//
// # Safety
// As for `cnbs_analytic_price`.
enum CnbsStatus cnbs_heat_kernel_price(const struct CnbsOptionSpec *spec,
                                       double spot,
                                       double time,
                                       double tol,
                                       double *out);

// Monte Carlo price at time 0. Deterministic in `(seed, n_paths)`.
//
// # Safety
// `spec` must point to a valid `CnbsOptionSpec`; `out` must be writable.
enum CnbsStatus cnbs_mc_price(const struct CnbsOptionSpec *spec,
                              double spot,
                              uint64_t n_paths,
                              uint64_t seed,
                              struct CnbsMcEstimate *out);

// Crank-Nicolson amplification factor for mesh ratio `c` and wave angle `theta`.
double cnbs_amp_cn(double c, double theta);

// Explicit-scheme amplification factor.
double cnbs_amp_explicit(double c, double theta);

// Solves on `[0, s_max]` with `n_space` intervals and `n_time` steps. With
// `strike_midway` the node count is adjusted so the strike sits halfway
// between two nodes. On success `*out` owns a new handle.
//
// # Safety
// `spec` must point to a valid `CnbsOptionSpec`; `out` must be writable.
enum CnbsStatus cnbs_surface_solve(const struct CnbsOptionSpec *spec,
                                   double s_max,
                                   size_t n_space,
                                   size_t n_time,
                                   bool strike_midway,
                                   struct CnbsSurface **out);

// Releases a handle from `cnbs_surface_solve`. Null is ignored.
//
// # Safety
// `surface` must be null or a live handle not freed before.
void cnbs_surface_free(struct CnbsSurface *surface);

// Number of space nodes (`rows`) and time levels (`cols`).
//
// # Safety
// `surface` must be a live handle; `rows` and `cols` must be writable.
enum CnbsStatus cnbs_surface_dims(const struct CnbsSurface *surface, size_t *rows, size_t *cols);

// Value at space node `i` and time level `j` (`j = 0` is expiry).
//
// # Safety
// `surface` must be a live handle; `out` must be writable.
enum CnbsStatus cnbs_surface_value(const struct CnbsSurface *surface,
                                   size_t i,
                                   size_t j,
                                   double *out);

// Interpolated value at `spot` and calendar `time`.
//
// # Safety
// `surface` must be a live handle; `out` must be writable.
enum CnbsStatus cnbs_surface_price_at(const struct CnbsSurface *surface,
                                      double spot,
                                      double time,
                                      double *out);

// Copies all values, node-major (`buf[i * cols + j]`), into `buf`, which
// must hold at least `rows * cols` doubles.
//
// # Safety
// `surface` must be a live handle; `buf` must be writable for `len` doubles.
enum CnbsStatus cnbs_surface_copy_values(const struct CnbsSurface *surface,
                                         double *buf,
                                         size_t len);

// Static description of a status code; unknown codes get a generic text.
const char *cnbs_status_message(int32_t status);

// Detail of the last failure on this thread, or an empty string after a
// success. Valid until the next cnbs call on the same thread.
const char *cnbs_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CNBS_H */
