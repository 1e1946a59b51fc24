#ifndef MERIDIAN_FFI_H
#define MERIDIAN_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MsStatus {
  MS_STATUS_OK = 0,
  MS_STATUS_NULL_POINTER = 1,
  MS_STATUS_INVALID_UTF8 = 2,
  /**
   * Config did not parse or failed validation.
   */
  MS_STATUS_CONFIG = 3,
  /**
   * The point is outside the surface domain (pole guard, singular chart, stencil).
   */
  MS_STATUS_DOMAIN = 4,
  /**
   * Any other evaluation failure.
   */
  MS_STATUS_EVALUATION = 5,
  MS_STATUS_NOT_A_MERIDIAN = 6,
  MS_STATUS_PANIC = 7,
} MsStatus;

typedef enum MsCase {
  MS_CASE_CASE_I = 1,
  MS_CASE_CASE_II = 2,
  MS_CASE_CASE_III = 3,
  MS_CASE_DEGENERATE = 4,
} MsCase;

typedef enum MsBranch {
  /**
   * Straight profile.
   */
  MS_BRANCH_BRANCH_CASE_I = 1,
  /**
   * Great circle with `kappa_alpha = g'/f`.
   */
  MS_BRANCH_BRANCH_CASE_II = 2,
  MS_BRANCH_NOT_SEMI_PARALLEL = 3,
  MS_BRANCH_INCONSISTENT = 4,
} MsBranch;

/**
 * Opaque surface handle.
 */
typedef struct MsSurface MsSurface;

/**
 * Invariants and residuals at one parameter point.
 */
typedef struct MsPointReport {
  double e;
  double f;
  double g;
  double k;
  double k_n;
  double h_norm;
  double umbilicity_deviation;
  double isotropy_deviation;
  double h_h2_minus_3k;
  double sp_residual;
  double gauss_res;
  double ricci_res;
  double codazzi_res;
} MsPointReport;

typedef struct MsClassification {
  enum MsCase case_;
  enum MsBranch branch;
  bool kappa_is_zero;
  bool kappa_alpha_is_zero;
  bool kappa_constant;
  bool semi_parallel;
  bool hyperplanar;
  double ode_residual_max;
  double ode_residual_alt_max;
  double semiparallel_residual_max;
} MsClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds a surface from a NUL-terminated JSON config and stores the new
 * handle in `*out`. The handle must be released with `ms_surface_free`.
 *
 * # Safety
 * `json` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum MsStatus ms_surface_from_json(const char *json, struct MsSurface **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `surface` must be null or a handle from `ms_surface_from_json` not yet freed.
 */
void ms_surface_free(struct MsSurface *surface);

/**
 * Number of grid points in the handle's config.
 *
 * # Safety
 * `surface` must be null or a live handle.
 */
size_t ms_surface_grid_len(const struct MsSurface *surface);

/**
 * Whether the surface carries a meridian description.
 *
 * # Safety
 * `surface` must be null or a live handle.
 */
bool ms_surface_is_meridian(const struct MsSurface *surface);

/**
 * Evaluates every invariant at `(u, v)`.
 *
 * # Safety
 * `surface` must be a live handle and `out` a valid pointer.
 */
enum MsStatus ms_surface_evaluate(const struct MsSurface *surface,
                                  double u,
                                  double v,
                                  struct MsPointReport *out);

/**
 * Classifies a meridian surface over the handle's grid.
 *
 * # Safety
 * `surface` must be a live handle and `out` a valid pointer.
 */
enum MsStatus ms_surface_classify(const struct MsSurface *surface, struct MsClassification *out);

/**
 * Runs the grid analysis and returns the CSV report in `*out`
 * (release with `ms_string_free`).
 *
 * # Safety
 * `surface` must be a live handle and `out` a valid pointer.
 */
enum MsStatus ms_surface_analyze_csv(const struct MsSurface *surface, char **out);

/**
 * Copy of the calling thread's last error message, or null if the last
 * call succeeded. Release with `ms_string_free`.
 */
char *ms_last_error_message(void);

/**
 * Releases a string returned by this library; null is ignored.
 *
 * # Safety
 * `s` must be null or a string from this library not yet freed.
 */
void ms_string_free(char *s);

/**
 * Library version, static storage.
 */
const char *ms_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MERIDIAN_FFI_H */
