#ifndef QLAB_H
#define QLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible entry point.
 */
typedef enum QlabStatus {
  QLAB_STATUS_OK = 0,
  QLAB_STATUS_INVALID_ARGUMENT = 1,
  QLAB_STATUS_COMPUTATION_FAILED = 2,
  QLAB_STATUS_VERIFICATION_FAILED = 3,
  QLAB_STATUS_PANIC = 4,
} QlabStatus;

/**
 * Opaque series handle. The layout is private to this library.
 */
typedef struct QlabSeries QlabSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the message for the most recent error on this thread, or NULL if
 * the last call succeeded. The pointer is valid until the next qlab call on
 * the same thread; do not free it.
 */
const char *qlab_last_error(void);

/**
 * Builds `(q^delta; q^delta)_inf` truncated at `trunc`. `modulus` 0 means
 * exact integers; otherwise coefficients live in Z/modulus.
 */
enum QlabStatus qlab_series_euler_product(uint64_t delta,
                                          uint64_t modulus,
                                          uint64_t trunc,
                                          struct QlabSeries **out);

/**
 * Builds the (u,v)-regular bipartition counting series truncated at `trunc`.
 */
enum QlabStatus qlab_bipartition_series_new(uint64_t u,
                                            uint64_t v,
                                            uint64_t modulus,
                                            uint64_t trunc,
                                            struct QlabSeries **out);

/**
 * Reads coefficient `n` (the value for negative `n` is 0 by convention).
 */
enum QlabStatus qlab_series_coeff(const struct QlabSeries *series, int64_t n, int64_t *out);

/**
 * Truncation order of the handle (coefficients 0..=trunc are stored).
 */
uint64_t qlab_series_trunc(const struct QlabSeries *series);

/**
 * Releases a series handle. NULL is accepted and ignored.
 */
void qlab_series_free(struct QlabSeries *series);

/**
 * Counts (u,v)-regular bipartitions of `n` by direct enumeration.
 */
enum QlabStatus qlab_bipartition_oracle(uint64_t u, uint64_t v, uint64_t n, uint64_t *out);

/**
 * Legendre symbol (a/p) for an odd prime p: returns -1, 0, or 1 via `out`.
 */
enum QlabStatus qlab_legendre(int64_t a, uint64_t p, int64_t *out);

/**
 * Runs the named congruence family and writes a JSON report array to
 * `*out_json` (free with `qlab_string_free`). `n_max` 0 keeps each
 * instance's default bound. Returns `VerificationFailed` if any instance
 * FAILs; the JSON is still written in that case.
 */
enum QlabStatus qlab_verify_family_json(const char *family_id, uint64_t n_max, char **out_json);

/**
 * Releases a string returned by this library. NULL is accepted and ignored.
 */
void qlab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QLAB_H */
