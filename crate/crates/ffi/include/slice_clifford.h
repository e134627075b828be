#ifndef SLICE_CLIFFORD_H
#define SLICE_CLIFFORD_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. `SLC_STATUS_OK` is zero.
 */
typedef enum SlcStatus {
  SLC_STATUS_OK = 0,
  SLC_STATUS_NULL_POINTER = 1,
  SLC_STATUS_INVALID_ARGUMENT = 2,
  SLC_STATUS_DIMENSION = 3,
  SLC_STATUS_NOT_INVERTIBLE = 4,
  SLC_STATUS_DOMAIN = 5,
  SLC_STATUS_HYPOTHESIS = 6,
  SLC_STATUS_IO = 7,
  SLC_STATUS_PANIC = 8,
} SlcStatus;

/**
 * Opaque Clifford element.
 */
typedef struct SlcElement SlcElement;

/**
 * Opaque slice map built from a truncated stem series.
 */
typedef struct SlcMap SlcMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into this library from the same thread.
 */
const char *slc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *slc_version(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void slc_string_free(char *s);

/**
 * Creates an element of `R_m` from its `2^m` coefficients in blade order
 * (bit `h-1` of the index stands for `e_h`).
 *
 * # Safety
 * `coeffs` must point to `len` readable doubles; `out` must be writable.
 */
enum SlcStatus slc_element_new(size_t m, const double *coeffs, size_t len, struct SlcElement **out);

/**
 * # Safety
 * `e` must be NULL or a handle from this library that was not freed.
 */
void slc_element_free(struct SlcElement *e);

/**
 * Number of generators `m`, or 0 for NULL.
 *
 * # Safety
 * `e` must be NULL or a live handle.
 */
size_t slc_element_generators(const struct SlcElement *e);

/**
 * Copies the `2^m` coefficients into `out`, which must hold `len >= 2^m` doubles.
 *
 * # Safety
 * `e` must be a live handle; `out` must point to `len` writable doubles.
 */
enum SlcStatus slc_element_coeffs(const struct SlcElement *e, double *out, size_t len);

/**
 * `out = a b`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum SlcStatus slc_element_mul(const struct SlcElement *a,
                               const struct SlcElement *b,
                               struct SlcElement **out);

/**
 * `out = a + b`.
 *
 * # Safety
 * `a`, `b` must be live handles; `out` must be writable.
 */
enum SlcStatus slc_element_add(const struct SlcElement *a,
                               const struct SlcElement *b,
                               struct SlcElement **out);

/**
 * Clifford conjugate.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum SlcStatus slc_element_conjugate(const struct SlcElement *a, struct SlcElement **out);

/**
 * Two-sided inverse; `SLC_STATUS_NOT_INVERTIBLE` for zero divisors.
 *
 * # Safety
 * `a` must be a live handle; `out` must be writable.
 */
enum SlcStatus slc_element_invert(const struct SlcElement *a, struct SlcElement **out);

/**
 * Componentwise Koebe-type map `x_t (1 - x_t e^{Iθ})^{-*2}` truncated at degree `truncation`.
 *
 * # Safety
 * `unit` must be a live handle holding an element of `S_m`; `out` must be writable.
 */
enum SlcStatus slc_map_koebe(size_t n,
                             double theta,
                             const struct SlcElement *unit,
                             size_t truncation,
                             struct SlcMap **out);

/**
 * Componentwise `x_t (1 - x_t e^{Iθ})^{-*1}`.
 *
 * # Safety
 * `unit` must be a live handle holding an element of `S_m`; `out` must be writable.
 */
enum SlcStatus slc_map_cayley(size_t n,
                              double theta,
                              const struct SlcElement *unit,
                              size_t truncation,
                              struct SlcMap **out);

/**
 * Builds a map from the stem-series JSON form `{"m", "n", "N", "terms": [{"k", "a"}]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum SlcStatus slc_map_from_json(const char *json, struct SlcMap **out);

/**
 * # Safety
 * `f` must be NULL or a handle from this library that was not freed.
 */
void slc_map_free(struct SlcMap *f);

/**
 * Evaluates `f(α + βJ)` for `n` variables and writes the `n · 2^m`
 * output coefficients, component after component, into `out`.
 *
 * # Safety
 * `alpha` and `beta` must hold `n` doubles, `j` must be a live handle,
 * and `out` must hold `out_len` writable doubles.
 */
enum SlcStatus slc_map_eval(const struct SlcMap *f,
                            const double *alpha,
                            const double *beta,
                            size_t n,
                            const struct SlcElement *j,
                            double *out,
                            size_t out_len);

/**
 * Runs a verification suite. `config_json` may be NULL for defaults; the
 * JSON report is returned in `report` (free with [`slc_string_free`]) and
 * `passed` receives whether every asserted check passed.
 *
 * # Safety
 * `suite` must be a NUL-terminated string, `config_json` NULL or one, and
 * `report`/`passed` writable.
 */
enum SlcStatus slc_run_suite(const char *suite,
                             const char *config_json,
                             char **report,
                             bool *passed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SLICE_CLIFFORD_H */
