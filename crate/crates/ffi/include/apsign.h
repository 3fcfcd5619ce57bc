/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef APSIGN_H
#define APSIGN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible call.
 */
typedef enum {
  AP_STATUS_OK = 0,
  AP_STATUS_NULL_POINTER = 1,
  AP_STATUS_INVALID_UTF8 = 2,
  AP_STATUS_PARSE_ERROR = 3,
  /**
   * The pattern does not meet the realizer's hypothesis.
   */
  AP_STATUS_HYPOTHESIS_FAILS = 4,
  /**
   * The matrix has no certificate of algebraic positivity.
   */
  AP_STATUS_NOT_CERTIFIED = 5,
  /**
   * Internal invariant violation or numerical limit.
   */
  AP_STATUS_ENGINE_FAILURE = 6,
  AP_STATUS_BUFFER_TOO_SMALL = 7,
  AP_STATUS_INVALID_ARGUMENT = 8,
  AP_STATUS_PANIC = 9,
} ApStatus;

/**
 * Opaque sign pattern.
 */
typedef struct ApPattern ApPattern;

/**
 * Opaque certified realization.
 */
typedef struct ApRealization ApRealization;

/**
 * Structural summary of a pattern.
 */
typedef struct {
  size_t order;
  bool irreducible;
  bool ap_irreducible;
  bool minimally_ap_irreducible;
  bool b_irreducible;
  /**
   * Number of irreducible components of A₊.
   */
  size_t components;
  bool hypothesis;
  /**
   * −A meets the hypothesis (A itself may not).
   */
  bool negation_hypothesis;
} ApCheckReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call into this library on the same thread.
 */
const char *ap_last_error(void);

/**
 * Library version as a static string.
 */
const char *ap_version(void);

/**
 * Free a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ap_string_free(char *s);

/**
 * Parse pattern text (rows of `+ - 0`, `#` comments).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
ApStatus ap_pattern_parse(const char *text, ApPattern **out);

/**
 * # Safety
 * `p` must come from [`ap_pattern_parse`] and not have been freed; null is ignored.
 */
void ap_pattern_free(ApPattern *p);

/**
 * Order of the pattern, 0 for null.
 *
 * # Safety
 * `p` must be null or a live handle.
 */
size_t ap_pattern_order(const ApPattern *p);

/**
 * Fill `out` with the structural report.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
ApStatus ap_pattern_check(const ApPattern *p, ApCheckReport *out);

/**
 * Build a certified matrix with the pattern's signs.
 *
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
ApStatus ap_realize(const ApPattern *p, ApRealization **out);

/**
 * # Safety
 * `r` must come from [`ap_realize`] and not have been freed; null is ignored.
 */
void ap_realization_free(ApRealization *r);

/**
 * Order of the realized matrix, 0 for null.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t ap_realization_order(const ApRealization *r);

/**
 * The simple eigenvalue of the certificate, NaN for null.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
double ap_realization_lambda(const ApRealization *r);

/**
 * Row-major matrix into `buf` (at least order² doubles).
 *
 * # Safety
 * `r` must be a live handle; `buf` must hold `len` doubles.
 */
ApStatus ap_realization_matrix(const ApRealization *r, double *buf, size_t len);

/**
 * Right (`which` = 0) or left (`which` = 1) eigenvector into `buf`.
 *
 * # Safety
 * `r` must be a live handle; `buf` must hold `len` doubles.
 */
ApStatus ap_realization_vector(const ApRealization *r, uint32_t which, double *buf, size_t len);

/**
 * Witness coefficients, ascending powers, rounded to double. `*count` gets
 * the number of coefficients (degree + 1) even when `buf` is too small.
 *
 * # Safety
 * `r` must be a live handle; `count` writable; `buf` must hold `len` doubles.
 */
ApStatus ap_realization_witness(const ApRealization *r, double *buf, size_t len, size_t *count);

/**
 * Full realization document as JSON; free with [`ap_string_free`]. Null on error.
 *
 * # Safety
 * `r` must be a live handle.
 */
char *ap_realization_json(const ApRealization *r);

/**
 * Search a row-major n×n matrix for a certificate. Returns `Ok` when one is
 * found (λ and, if non-null, u and v of length n are written),
 * `NotCertified` otherwise.
 *
 * # Safety
 * `data` must hold n² doubles; `lambda` writable; `u`, `v` null or n doubles.
 */
ApStatus ap_verify(const double *data, size_t n, double *lambda, double *u, double *v);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* APSIGN_H */
