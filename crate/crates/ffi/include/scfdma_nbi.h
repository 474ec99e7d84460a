#ifndef SCFDMA_NBI_H
#define SCFDMA_NBI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum NbiStatus {
  NBI_STATUS_OK = 0,
  NBI_STATUS_NULL_POINTER = 1,
  NBI_STATUS_INVALID_ARGUMENT = 2,
  NBI_STATUS_DIMENSION = 3,
  NBI_STATUS_NUMERIC = 4,
  NBI_STATUS_CONFIG = 5,
  NBI_STATUS_IO = 6,
  NBI_STATUS_PANIC = 7,
} NbiStatus;

// Output of [`nbi_sabmp_solve`].
typedef struct NbiEstimate NbiEstimate;

// Records produced by [`nbi_scenario_run`].
typedef struct NbiResults NbiResults;

// A configured experiment.
typedef struct NbiScenario NbiScenario;

// Complex sample, layout-compatible with `double _Complex`.
typedef struct NbiComplex {
  double re;
  double im;
} NbiComplex;

// One BER point.
typedef struct NbiBerRecord {
  double ebn0_db;
  uint64_t trials;
  uint64_t bit_errors;
  uint64_t total_bits;
  double ber;
  uint64_t wall_time_ms;
} NbiBerRecord;

// One reliable-carrier success-rate point.
typedef struct NbiSuccessRecord {
  double ebn0_db;
  uint64_t trials;
  uint64_t correct;
  uint64_t selected;
  double success_rate;
} NbiSuccessRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread; empty after a
// success. The pointer stays valid until the next call on this thread.
const char *nbi_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *nbi_version(void);

// Solve `x = psi s + z` for sparse `s`.
//
// `psi` is `m x n`, row-major. `lambda` holds either one broadcast value or
// `n` per-index values. A `t_max` of zero selects the two-sigma default.
//
// # Safety
// Pointers must be valid for the stated lengths; `out` must be writable.
enum NbiStatus nbi_sabmp_solve(const struct NbiComplex *x,
                               size_t m,
                               const struct NbiComplex *psi,
                               size_t n,
                               const double *lambda,
                               size_t lambda_len,
                               double noise_var,
                               size_t t_max,
                               struct NbiEstimate **out);

// Length of the estimate (the `n` passed to the solver), or 0 for null.
//
// # Safety
// `est` must be null or a live handle.
size_t nbi_estimate_len(const struct NbiEstimate *est);

// Copy the AMMSE estimate into `values` (capacity `len`, at least the
// estimate length).
//
// # Safety
// `est` must be a live handle and `values` writable for `len` elements.
enum NbiStatus nbi_estimate_values(const struct NbiEstimate *est,
                                   struct NbiComplex *values,
                                   size_t len);

// Number of supports in the dominant chain.
//
// # Safety
// `est` must be null or a live handle.
size_t nbi_estimate_support_count(const struct NbiEstimate *est);

// Describe the `k`-th dominant support. Up to `cap` indices are written to
// `indices`; `size` receives the full support size. `weight` and `nu` may
// be null.
//
// # Safety
// `est` must be a live handle; `indices` writable for `cap` elements;
// `size` writable; `weight` and `nu` null or writable.
enum NbiStatus nbi_estimate_support(const struct NbiEstimate *est,
                                    size_t k,
                                    size_t *indices,
                                    size_t cap,
                                    size_t *size,
                                    double *weight,
                                    double *nu);

// Trace of the solver's error covariance.
//
// # Safety
// `est` must be a live handle and `out` writable.
enum NbiStatus nbi_estimate_error_trace(const struct NbiEstimate *est, double *out);

// # Safety
// `est` must be null or a handle not yet freed.
void nbi_estimate_free(struct NbiEstimate *est);

// Gini index of the magnitudes of `v`.
//
// # Safety
// `v` must be readable for `n` elements and `out` writable.
enum NbiStatus nbi_gini_index(const struct NbiComplex *v, size_t n, double *out);

// Orthonormal Haar transform in place; `n` must be a power of two.
//
// # Safety
// `v` must be valid for reads and writes of `n` elements.
enum NbiStatus nbi_haar_forward(struct NbiComplex *v, size_t n);

// Inverse of [`nbi_haar_forward`].
//
// # Safety
// `v` must be valid for reads and writes of `n` elements.
enum NbiStatus nbi_haar_inverse(struct NbiComplex *v, size_t n);

// Built-in preset at `n` subcarriers (0 selects 128).
//
// # Safety
// `name` must be a NUL-terminated string and `out` writable.
enum NbiStatus nbi_scenario_preset(const char *name, size_t n, struct NbiScenario **out);

// Scenario file; `n` of 0 keeps the file's (or the default) size.
//
// # Safety
// `path` must be a NUL-terminated string and `out` writable.
enum NbiStatus nbi_scenario_from_file(const char *path, size_t n, struct NbiScenario **out);

// # Safety
// `s` must be a live handle.
enum NbiStatus nbi_scenario_set_trials(struct NbiScenario *s, size_t trials);

// # Safety
// `s` must be a live handle.
enum NbiStatus nbi_scenario_set_seed(struct NbiScenario *s, uint64_t seed);

// Replace the Eb/N0 grid with `len` values in dB.
//
// # Safety
// `s` must be a live handle and `ebn0_db` readable for `len` elements.
enum NbiStatus nbi_scenario_set_ebn0(struct NbiScenario *s, const double *ebn0_db, size_t len);

// Replace the Eb/N0 grid from `start:stop:step` or a comma list.
//
// # Safety
// `s` must be a live handle and `grid` a NUL-terminated string.
enum NbiStatus nbi_scenario_set_ebn0_grid(struct NbiScenario *s, const char *grid);

// # Safety
// `s` must be a live handle and `out` writable.
enum NbiStatus nbi_scenario_run(const struct NbiScenario *s, struct NbiResults **out);

// # Safety
// `s` must be null or a handle not yet freed.
void nbi_scenario_free(struct NbiScenario *s);

// Number of BER records.
//
// # Safety
// `r` must be null or a live handle.
size_t nbi_results_count(const struct NbiResults *r);

// Number of success-rate records (nonzero only for success-rate scenarios).
//
// # Safety
// `r` must be null or a live handle.
size_t nbi_results_success_count(const struct NbiResults *r);

// # Safety
// `r` must be a live handle and `out` writable.
enum NbiStatus nbi_results_get(const struct NbiResults *r, size_t index, struct NbiBerRecord *out);

// # Safety
// `r` must be a live handle and `out` writable.
enum NbiStatus nbi_results_get_success(const struct NbiResults *r,
                                       size_t index,
                                       struct NbiSuccessRecord *out);

// `scenario/curve` label of a record, owned by the results handle; BER
// records come first, then success records. Null when out of range.
//
// # Safety
// `r` must be null or a live handle.
const char *nbi_results_label(const struct NbiResults *r, size_t index);

// Write the records as CSV. With `deterministic`, wall times are zero.
//
// # Safety
// `r` must be a live handle and `path` a NUL-terminated string.
enum NbiStatus nbi_results_write_csv(const struct NbiResults *r,
                                     const char *path,
                                     bool deterministic);

// # Safety
// `r` must be null or a handle not yet freed.
void nbi_results_free(struct NbiResults *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCFDMA_NBI_H */
