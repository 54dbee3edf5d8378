#ifndef WAVEWALK_H
#define WAVEWALK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define WW_METHOD_DIRECT 0

#define WW_METHOD_MIXED 1

#define WW_METHOD_QUADRATURE 2

#define WW_BACKEND_EM 0

#define WW_BACKEND_WOS 1

/**
 * Result code of every fallible call.
 */
typedef enum WwStatus {
  WW_STATUS_OK = 0,
  WW_STATUS_NULL_POINTER = 1,
  WW_STATUS_INVALID_ARGUMENT = 2,
  WW_STATUS_DIMENSION_MISMATCH = 3,
  WW_STATUS_NOT_INTERIOR = 4,
  WW_STATUS_TRUNCATED = 5,
  WW_STATUS_BOUND_VIOLATION = 6,
  WW_STATUS_TAIL_TOO_LARGE = 7,
  WW_STATUS_IO = 8,
  WW_STATUS_PANIC = 9,
} WwStatus;

/**
 * Opaque boundary-data handle.
 */
typedef struct WwBoundary WwBoundary;

/**
 * Opaque domain handle.
 */
typedef struct WwDomain WwDomain;

/**
 * `f(s, y)` supplied by the caller. Called concurrently from worker threads.
 */
typedef double (*WwBoundaryFn)(void *user_data, double s, const double *y, size_t dim);

/**
 * Sampler settings. Fill with `ww_sampler_options_default`.
 */
typedef struct WwSamplerOptions {
  double em_base_step;
  double em_boundary_slowdown;
  uint64_t em_max_steps;
  double em_snap_tolerance;
  double wos_epsilon;
  uint64_t wos_max_jumps;
  double quad_radius;
  uint64_t quad_nodes;
  double quad_max_tail;
  uint64_t n_inner;
  /**
   * Fixed partition count; results are reproducible for a given value.
   */
  uint64_t partitions;
} WwSamplerOptions;

/**
 * Monte Carlo estimate with the seed triple of its first replicate.
 */
typedef struct WwEstimate {
  double mean;
  double std_error;
  uint64_t n;
  uint64_t base_seed;
  uint64_t stream_id;
  uint64_t sample_index;
} WwEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version, a static NUL-terminated string.
 */
const char *ww_version(void);

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *ww_last_error_message(void);

/**
 * The open interval `(lo, hi)`.
 *
 * # Safety
 * `out` must be a valid pointer to a `WwDomain*`.
 */
enum WwStatus ww_domain_interval(double lo, double hi, struct WwDomain **out);

/**
 * The open ball of `radius` around `center[0..dim]`.
 *
 * # Safety
 * `center` must point to `dim` doubles; `out` must be valid.
 */
enum WwStatus ww_domain_ball(const double *center,
                             size_t dim,
                             double radius,
                             struct WwDomain **out);

/**
 * The open box `Π (lo_i, hi_i)`.
 *
 * # Safety
 * `lo` and `hi` must point to `dim` doubles; `out` must be valid.
 */
enum WwStatus ww_domain_box(const double *lo, const double *hi, size_t dim, struct WwDomain **out);

/**
 * Releases a domain. NULL is ignored.
 *
 * # Safety
 * `domain` must come from a `ww_domain_*` constructor and not be used again.
 */
void ww_domain_free(struct WwDomain *domain);

/**
 * Spatial dimension, or 0 for NULL.
 *
 * # Safety
 * `domain` must be NULL or a live handle.
 */
size_t ww_domain_dim(const struct WwDomain *domain);

/**
 * Distance from interior point `x` to the boundary.
 *
 * # Safety
 * `x` must point to `dim` doubles; `domain` and `out` must be valid.
 */
enum WwStatus ww_domain_distance(const struct WwDomain *domain,
                                 const double *x,
                                 size_t dim,
                                 double *out);

/**
 * `f(s, y) = e^{y_1} cos s`.
 *
 * # Safety
 * `out` must be valid.
 */
enum WwStatus ww_boundary_paper(struct WwBoundary **out);

/**
 * `f(s, y) = e^{⟨a, y⟩} cos(|a| s)`.
 *
 * # Safety
 * `a` must point to `dim` doubles; `out` must be valid.
 */
enum WwStatus ww_boundary_exp_cos(const double *a, size_t dim, struct WwBoundary **out);

/**
 * `f ≡ value`.
 *
 * # Safety
 * `out` must be valid.
 */
enum WwStatus ww_boundary_constant(double value, struct WwBoundary **out);

/**
 * `f(s, y) = 1` if `y[axis] > threshold`, else 0.
 *
 * # Safety
 * `out` must be valid.
 */
enum WwStatus ww_boundary_indicator(size_t axis, double threshold, struct WwBoundary **out);

/**
 * Tabulated data from a JSON file `{bound, s, points, values}`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be valid.
 */
enum WwStatus ww_boundary_tabulated_json(const char *path, struct WwBoundary **out);

/**
 * Boundary data evaluated by a C callback with declared bound `|f| ≤ bound`.
 * A value beyond the bound aborts the estimate with `BOUND_VIOLATION`.
 *
 * # Safety
 * `func` must be thread-safe and `user_data` must outlive the handle.
 */
enum WwStatus ww_boundary_callback(WwBoundaryFn func,
                                   void *user_data,
                                   double bound,
                                   struct WwBoundary **out);

/**
 * Releases boundary data. NULL is ignored.
 *
 * # Safety
 * `boundary` must come from a `ww_boundary_*` constructor and not be used again.
 */
void ww_boundary_free(struct WwBoundary *boundary);

/**
 * Default sampler settings for `domain`.
 *
 * # Safety
 * `domain` and `out` must be valid.
 */
enum WwStatus ww_sampler_options_default(const struct WwDomain *domain,
                                         struct WwSamplerOptions *out);

/**
 * Estimates `u(t, x)` with `n` samples.
 *
 * `method` is one of `WW_METHOD_*`; `opts` may be NULL for defaults.
 *
 * # Safety
 * Handles must be live, `x` must point to `dim` doubles, `out` must be valid.
 */
enum WwStatus ww_estimate_u(const struct WwDomain *domain,
                            const struct WwBoundary *boundary,
                            double t,
                            const double *x,
                            size_t dim,
                            uint64_t n,
                            uint32_t method,
                            const struct WwSamplerOptions *opts,
                            uint64_t base_seed,
                            struct WwEstimate *out);

/**
 * Estimates the harmonic lift `v(s, x)`; `backend` is one of `WW_BACKEND_*`.
 *
 * # Safety
 * As for [`ww_estimate_u`].
 */
enum WwStatus ww_estimate_v(const struct WwDomain *domain,
                            const struct WwBoundary *boundary,
                            double s,
                            const double *x,
                            size_t dim,
                            uint64_t n,
                            uint32_t backend,
                            const struct WwSamplerOptions *opts,
                            uint64_t base_seed,
                            struct WwEstimate *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WAVEWALK_H */
