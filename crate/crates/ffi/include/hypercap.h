#ifndef HYPERCAP_H
#define HYPERCAP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum HcStatus {
  HC_STATUS_OK = 0,
  HC_STATUS_INVALID_INPUT = 1,
  HC_STATUS_ZERO_POLYNOMIAL = 2,
  HC_STATUS_BUDGET_EXCEEDED = 3,
  HC_STATUS_HYPERBOLICITY_VIOLATION = 4,
  HC_STATUS_NOT_CONVERGED = 5,
  HC_STATUS_NUMERICAL = 6,
  HC_STATUS_IO = 7,
  HC_STATUS_NULL_POINTER = 8,
  /**
   * The operation does not apply to this kind of polynomial.
   */
  HC_STATUS_WRONG_KIND = 9,
  HC_STATUS_PANIC = 10,
} HcStatus;

typedef enum HcCapacityStatus {
  HC_CAPACITY_STATUS_CONVERGED = 0,
  HC_CAPACITY_STATUS_BUDGET_EXHAUSTED = 1,
  HC_CAPACITY_STATUS_UNBOUNDED_BELOW_SUSPECTED = 2,
} HcCapacityStatus;

/**
 * Opaque polynomial handle.
 */
typedef struct HcPolynomial HcPolynomial;

typedef struct HcCapacityReport {
  double cap_estimate;
  /**
   * `Cap(p) >= cap_estimate * exp(-gap_bound)`.
   */
  double gap_bound;
  size_t iterations;
  enum HcCapacityStatus status;
} HcCapacityReport;

typedef struct HcApproximation {
  double estimate;
  double coefficient_lower;
  double coefficient_upper;
  double factor;
  size_t derivatives_taken;
} HcApproximation;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a polynomial from an input document (`matrix`, `tuple` or `sparse` kind).
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum HcStatus hc_polynomial_from_json(const char *json, struct HcPolynomial **out);

/**
 * Build the multilinear polynomial of a nonnegative `n x n` matrix given row-major.
 *
 * # Safety
 * `entries` must point to `n * n` doubles and `out` must be valid.
 */
enum HcStatus hc_polynomial_from_matrix(const double *entries, size_t n, struct HcPolynomial **out);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `p` must come from one of the constructors and not be freed twice.
 */
void hc_polynomial_free(struct HcPolynomial *p);

/**
 * Number of variables, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t hc_polynomial_num_vars(const struct HcPolynomial *p);

/**
 * Total degree, or 0 for a null handle.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t hc_polynomial_degree(const struct HcPolynomial *p);

/**
 * Evaluate at `x` (length `len`, which must equal the number of variables).
 *
 * # Safety
 * `x` must point to `len` doubles and `out` must be valid.
 */
enum HcStatus hc_polynomial_eval(const struct HcPolynomial *p,
                                 const double *x,
                                 size_t len,
                                 double *out);

/**
 * Mixed form `∂^n/∂t_1..∂t_n p(Σ t_i X_i)` for `n` points stored row-major in `xs`.
 *
 * # Safety
 * `xs` must point to `degree * num_vars` doubles and `out` must be valid.
 */
enum HcStatus hc_mixed_form(const struct HcPolynomial *p, const double *xs, double *out);

/**
 * Capacity `inf_{x > 0, Πx = 1} p(x)` to log-gap `tol`.
 *
 * When `minimizer` is non-null it receives the log-space minimizer and must
 * hold `num_vars` doubles.
 *
 * # Safety
 * `out` must be valid; `minimizer` must be null or hold `num_vars` doubles.
 */
enum HcStatus hc_capacity(const struct HcPolynomial *p,
                          double tol,
                          struct HcCapacityReport *out,
                          double *minimizer);

/**
 * Deterministic estimate of the coefficient of `x_1..x_n`; `m > 0` first
 * differentiates away `ceil(m log2 n)` variables.
 *
 * # Safety
 * `out` must be valid.
 */
enum HcStatus hc_approximate_coefficient(const struct HcPolynomial *p,
                                         uint32_t m,
                                         struct HcApproximation *out);

/**
 * Exact permanent of a matrix-backed handle. `value` and `text` may each be
 * null; a non-null `text` receives a rational string to release with
 * `hc_string_free`.
 *
 * # Safety
 * Non-null pointers must be valid for writes.
 */
enum HcStatus hc_permanent(const struct HcPolynomial *p, double *value, char **text);

/**
 * Exact mixed discriminant of a tuple-backed handle; see `hc_permanent`.
 *
 * # Safety
 * Non-null pointers must be valid for writes.
 */
enum HcStatus hc_mixed_discriminant(const struct HcPolynomial *p, double *value, char **text);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void hc_string_free(char *s);

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into the library from the same thread.
 */
const char *hc_last_error_message(void);

/**
 * Static, NUL-terminated name of a status code.
 */
const char *hc_status_name(enum HcStatus status);

const char *hc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HYPERCAP_H */
