#ifndef QCHAR_H
#define QCHAR_H

/* Generated by cbindgen from the qchar-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a C-ABI call.
typedef enum QcharStatus {
  // The call succeeded and every `out` pointer was written.
  QCHAR_STATUS_OK = 0,
  // A required pointer argument was null.
  QCHAR_STATUS_NULL_ARGUMENT = 1,
  // An argument failed to parse or violated a documented contract.
  QCHAR_STATUS_INVALID_INPUT = 2,
  // The computation itself failed (overflow, truncation, budget, ...).
  QCHAR_STATUS_COMPUTE_FAILED = 3,
  // A panic was caught at the boundary; state is unchanged.
  QCHAR_STATUS_PANICKED = 4,
} QcharStatus;

// Opaque owner of one exact character series.
typedef struct QcharSeriesHandle QcharSeriesHandle;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string. Do not free.
const char *qchar_version(void);

// Most recent error message raised on the calling thread, as a
// NUL-terminated string. The pointer stays valid until the next failing
// call on the same thread. Do not free.
const char *qchar_last_error(void);

// Build the normalized q-character of the l-weight written in `expr`
// (for example `"Y[-1]*Y[-3]"` or `"Psi[0]^-1"`), tracked on the region
// `[rmin, rmax]` with total degree at most `degcap`.
//
// Products of positive `Y` powers give the finite standard character
// exactly; any other negative l-weight gives the limit character
// truncated to the region. On `Ok`, `*out` owns the series and must be
// released with [`qchar_series_free`].
//
// # Safety
// `expr` must be a valid NUL-terminated C string and `out` a valid
// pointer to writable memory.
enum QcharStatus qchar_series_new(const char *expr,
                                  int64_t rmin,
                                  int64_t rmax,
                                  uint32_t degcap,
                                  struct QcharSeriesHandle **out);

// Number of tracked monomials in the series.
//
// # Safety
// `series` must be a live handle from this library and `out` a valid
// pointer to writable memory.
enum QcharStatus qchar_series_term_count(const struct QcharSeriesHandle *series, size_t *out);

// Exact integer coefficient of one inverse-A monomial, written as in
// `"A[0]^-1*A[-2]^-1"` (or `"1"` for the constant term). Asking for a
// monomial outside the tracked region is an error, not a zero.
//
// # Safety
// `series` must be a live handle, `monomial` a valid NUL-terminated C
// string, and `out` a valid pointer to writable memory.
enum QcharStatus qchar_series_coefficient(const struct QcharSeriesHandle *series,
                                          const char *monomial,
                                          int64_t *out);

// Render the series as a JSON object with its window and a sorted term
// list. On `Ok`, `*out` owns the string and must be released with
// [`qchar_string_free`].
//
// # Safety
// `series` must be a live handle and `out` a valid pointer to writable
// memory.
enum QcharStatus qchar_series_to_json(const struct QcharSeriesHandle *series, char **out);

// Verify, coefficient-exactly on `[rmin, rmax]` with degree cap
// `degcap`, that the limit character decomposes as a multiplicity-free
// sum of simple characters. Writes `true` into `out_passed` only if
// both the equality and multiplicity-freeness hold.
//
// # Safety
// `out_passed` must be a valid pointer to writable memory.
enum QcharStatus qchar_verify_decomposition(int64_t rmin,
                                            int64_t rmax,
                                            uint32_t degcap,
                                            bool *out_passed);

// Release a series handle. Null is ignored. The handle must not be used
// afterwards.
//
// # Safety
// `series` must be null or a handle produced by this library that has
// not been freed before.
void qchar_series_free(struct QcharSeriesHandle *series);

// Release a string produced by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string produced by this library that has not
// been freed before.
void qchar_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCHAR_H */
