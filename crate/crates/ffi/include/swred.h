#ifndef SWRED_H
#define SWRED_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SwredDimensionCase {
  SWRED_DIMENSION_CASE_MODULI = 0,
  SWRED_DIMENSION_CASE_FIXED_SPINOR = 1,
  SWRED_DIMENSION_CASE_VORTEX_PSI1_ZERO = 2,
  SWRED_DIMENSION_CASE_VORTEX_PSI2_ZERO = 3,
} SwredDimensionCase;

/**
 * Which field of a configuration.
 */
typedef enum SwredField {
  SWRED_FIELD_A = 0,
  SWRED_FIELD_PSI1 = 1,
  SWRED_FIELD_PSI2 = 2,
  SWRED_FIELD_PHI = 3,
} SwredField;

typedef enum SwredMethod {
  SWRED_METHOD_GAUSS_NEWTON = 0,
  SWRED_METHOD_GRADIENT_FLOW = 1,
} SwredMethod;

/**
 * Status codes.
 */
typedef enum SwredStatus {
  SWRED_STATUS_OK = 0,
  SWRED_STATUS_NULL_POINTER = 1,
  SWRED_STATUS_INVALID_ARGUMENT = 2,
  SWRED_STATUS_INVALID_GRID = 3,
  SWRED_STATUS_NON_PERIODIC = 4,
  SWRED_STATUS_NOT_A_SOLUTION = 5,
  SWRED_STATUS_NO_CONVERGENCE = 6,
  SWRED_STATUS_IO = 7,
  SWRED_STATUS_PARSE = 8,
  SWRED_STATUS_PANIC = 9,
  SWRED_STATUS_OTHER = 10,
} SwredStatus;

/**
 * Opaque configuration handle.
 */
typedef struct SwredConfiguration SwredConfiguration;

/**
 * Sup and L² norms of the four residuals, and the energy.
 */
typedef struct SwredResiduals {
  double r1_max;
  double r1_l2;
  double r2_max;
  double r2_l2;
  double r3a_max;
  double r3a_l2;
  double r3b_max;
  double r3b_l2;
  double energy;
} SwredResiduals;

typedef struct SwredSolveSummary {
  size_t iterations;
  double final_energy;
  double max_residual;
  bool converged;
} SwredSolveSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version string; static storage.
 */
const char *swred_version(void);

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into the library on the same thread.
 */
const char *swred_last_error_message(void);

/**
 * Explicit solution on an `n × n` grid of a torus with side `side`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum SwredStatus swred_explicit_solution(size_t n,
                                         double side,
                                         double c2,
                                         double phase,
                                         struct SwredConfiguration **out);

/**
 * Random configuration with Fourier modes up to `max_mode`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum SwredStatus swred_random_configuration(size_t n,
                                            double side,
                                            uint64_t seed,
                                            size_t max_mode,
                                            double amplitude,
                                            struct SwredConfiguration **out);

/**
 * Adds band-limited noise of pointwise size `amplitude`.
 *
 * # Safety
 * `c` must be a live handle and `out` valid writable storage.
 */
enum SwredStatus swred_perturb(const struct SwredConfiguration *c,
                               uint64_t seed,
                               size_t max_mode,
                               double amplitude,
                               struct SwredConfiguration **out);

/**
 * Builds a configuration from four interleaved complex arrays of `2 n²`
 * doubles each.
 *
 * # Safety
 * Each pointer must reference `2 n²` readable doubles.
 */
enum SwredStatus swred_configuration_new(size_t n,
                                         double side,
                                         const double *a,
                                         const double *psi1,
                                         const double *psi2,
                                         const double *phi,
                                         struct SwredConfiguration **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `c` must come from this library and not be used afterwards.
 */
void swred_configuration_free(struct SwredConfiguration *c);

/**
 * Grid points per side and side length.
 *
 * # Safety
 * `c` must be a live handle; `n` and `side` may be null.
 */
enum SwredStatus swred_configuration_grid(const struct SwredConfiguration *c,
                                          size_t *n,
                                          double *side);

/**
 * Copies one field into `buf`, which holds `len` doubles (at least `2 n²`).
 *
 * # Safety
 * `c` must be a live handle and `buf` must reference `len` writable doubles.
 */
enum SwredStatus swred_configuration_field(const struct SwredConfiguration *c,
                                           enum SwredField which,
                                           double *buf,
                                           size_t len);

/**
 * Residual norms of the four equations.
 *
 * # Safety
 * `c` must be a live handle and `out` valid writable storage.
 */
enum SwredStatus swred_residuals(const struct SwredConfiguration *c, struct SwredResiduals *out);

/**
 * Minimises the residual energy from `initial`. On success `*out` receives
 * the result; on `SWRED_STATUS_NO_CONVERGENCE` `*summary` is still filled
 * and `*out` is left untouched. `summary` may be null.
 *
 * # Safety
 * `initial` must be a live handle; `out` valid writable storage.
 */
enum SwredStatus swred_solve(const struct SwredConfiguration *initial,
                             enum SwredMethod method,
                             size_t max_iters,
                             double energy_tol,
                             struct SwredConfiguration **out,
                             struct SwredSolveSummary *summary_out);

/**
 * Writes a configuration container.
 *
 * # Safety
 * `c` must be a live handle and `path` a NUL-terminated UTF-8 string.
 */
enum SwredStatus swred_configuration_save(const struct SwredConfiguration *c, const char *path);

/**
 * Reads a configuration container.
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string and `out` valid writable storage.
 */
enum SwredStatus swred_configuration_load(const char *path, struct SwredConfiguration **out);

/**
 * Closed-form moduli dimension for genus `g` and degree `c1`.
 *
 * # Safety
 * `out` must be valid writable storage.
 */
enum SwredStatus swred_dimension(int64_t g,
                                 int64_t c1,
                                 enum SwredDimensionCase case_,
                                 int64_t *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SWRED_H */
