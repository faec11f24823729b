#ifndef POLARLAB_H
#define POLARLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Real scalars.
 */
#define POLAR_FIELD_REAL 0

/**
 * Complex scalars.
 */
#define POLAR_FIELD_COMPLEX 1

/**
 * Result of every call.
 */
typedef enum PolarStatus {
  POLAR_STATUS_OK = 0,
  POLAR_STATUS_NULL_POINTER = 1,
  POLAR_STATUS_INVALID_ARGUMENT = 2,
  POLAR_STATUS_INVALID_EXPONENT = 3,
  POLAR_STATUS_INVALID_DIMENSION = 4,
  POLAR_STATUS_DIMENSION_MISMATCH = 5,
  POLAR_STATUS_RESOURCE_LIMIT = 6,
  POLAR_STATUS_NON_CONVERGENCE = 7,
  POLAR_STATUS_NUMERICAL = 8,
  POLAR_STATUS_PANIC = 9,
} PolarStatus;

/**
 * A system of linear functionals `ψ_1, …, ψ_n` on `ℓ_p^d`.
 */
typedef struct PolarFunctionalSystem PolarFunctionalSystem;

/**
 * An `n × d` matrix of signs.
 */
typedef struct PolarSignMatrix PolarSignMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *polar_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *polar_version(void);

/**
 * `q` with `1/p + 1/q = 1`. Pass `INFINITY` for `p = ∞`.
 *
 * # Safety
 * `q` must be a valid pointer.
 */
enum PolarStatus polar_dual_exponent(double p, double *q);

/**
 * `L(d, K)`, the mean of `log|⟨x, ψ⟩|` over the Euclidean sphere.
 *
 * # Safety
 * `l` must be a valid pointer.
 */
enum PolarStatus polar_l_constant(size_t d, uint32_t field_code, double *l);

/**
 * `L(d, K)` by one-dimensional quadrature.
 *
 * # Safety
 * `l` must be a valid pointer.
 */
enum PolarStatus polar_quadrature_l(size_t d, uint32_t field_code, double *l);

/**
 * `c(ℓ_2^d) = exp(−L(d, K))`.
 *
 * # Safety
 * `c` must be a valid pointer.
 */
enum PolarStatus polar_hilbert_polarization(size_t d, uint32_t field_code, double *c);

/**
 * `(1/2)·sqrt(d^n / (24n)^d)`.
 *
 * # Safety
 * `value` must be a valid pointer.
 */
enum PolarStatus polar_cn_infty_lower_bound(size_t n, size_t d, double *value);

/**
 * Builds a system from `n` rows of length `d`, stored row-major in
 * `re` (and `im`, which may be null for real entries).
 *
 * # Safety
 * `re` (and `im` if non-null) must hold `n·d` doubles; `system` must be a
 * valid pointer.
 */
enum PolarStatus polar_system_new(double p,
                                  size_t d,
                                  uint32_t field_code,
                                  size_t n,
                                  const double *re,
                                  const double *im,
                                  struct PolarFunctionalSystem **system);

/**
 * Releases a system; null is ignored.
 *
 * # Safety
 * `system` must come from [`polar_system_new`] and not be used afterwards.
 */
void polar_system_free(struct PolarFunctionalSystem *system);

/**
 * `∏_j ψ_j(x)` for `x` of length `d`.
 *
 * # Safety
 * `system` must be live; `x_re` (and `x_im` if non-null) must hold `d`
 * doubles; the outputs must be valid pointers.
 */
enum PolarStatus polar_system_evaluate(const struct PolarFunctionalSystem *system,
                                       const double *x_re,
                                       const double *x_im,
                                       double *value_re,
                                       double *value_im);

/**
 * Sup-norm over the unit sphere of `ℓ_p^d` by multi-start ascent.
 * `witness_re` / `witness_im` receive `d` entries each when non-null.
 *
 * # Safety
 * `system` must be live; `value` must be valid; non-null witness buffers
 * must hold `d` doubles.
 */
enum PolarStatus polar_system_sup_norm(const struct PolarFunctionalSystem *system,
                                       size_t starts,
                                       uint64_t seed,
                                       double *value,
                                       double *witness_re,
                                       double *witness_im);

/**
 * Builds a sign matrix from `n·d` entries (row-major), each `+1` or `−1`.
 *
 * # Safety
 * `entries` must hold `n·d` values; `sign` must be a valid pointer.
 */
enum PolarStatus polar_sign_matrix_new(size_t n,
                                       size_t d,
                                       const int8_t *entries,
                                       struct PolarSignMatrix **sign);

/**
 * Independent uniform signs from `seed`.
 *
 * # Safety
 * `sign` must be a valid pointer.
 */
enum PolarStatus polar_sign_matrix_random(size_t n,
                                          size_t d,
                                          uint64_t seed,
                                          struct PolarSignMatrix **sign);

/**
 * Releases a sign matrix; null is ignored.
 *
 * # Safety
 * `sign` must come from a `polar_sign_matrix_*` constructor and not be
 * used afterwards.
 */
void polar_sign_matrix_free(struct PolarSignMatrix *sign);

/**
 * `F(z) = ∏_j Σ_k ε_{jk} z_k`.
 *
 * # Safety
 * `sign` must be live; `z_re` (and `z_im` if non-null) must hold `d`
 * doubles; the outputs must be valid pointers.
 */
enum PolarStatus polar_sign_matrix_evaluate(const struct PolarSignMatrix *sign,
                                            const double *z_re,
                                            const double *z_im,
                                            double *value_re,
                                            double *value_im);

/**
 * Sup-norm of `|F|` over the polydisc from an `net_n`-point torus net
 * (`0` selects `24n`). `certificate` receives the upper bound, and
 * `heuristic` is set to 1 when the net had to be subsampled.
 *
 * # Safety
 * `sign` must be live; `value` and `certificate` must be valid; `heuristic`
 * may be null.
 */
enum PolarStatus polar_sign_matrix_sup_norm(const struct PolarSignMatrix *sign,
                                            size_t net_n,
                                            bool refine,
                                            double *value,
                                            double *certificate,
                                            bool *heuristic);

/**
 * Monte Carlo lower and upper bounds for `c(ℓ_p^d)`; `std_error` is the
 * combined standard error of the two lines.
 *
 * # Safety
 * The three outputs must be valid pointers.
 */
enum PolarStatus polar_bounds(double p,
                              size_t d,
                              uint32_t field_code,
                              size_t samples,
                              uint64_t seed,
                              double *lower,
                              double *upper,
                              double *std_error);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* POLARLAB_H */
