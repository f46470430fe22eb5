#ifndef CUBECF_H
#define CUBECF_H

/* Generated by cbindgen; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum CubecfStatus {
  CUBECF_STATUS_OK = 0,
  CUBECF_STATUS_NULL_POINTER = 1,
  CUBECF_STATUS_INVALID_ARGUMENT = 2,
  CUBECF_STATUS_DOMAIN = 3,
  CUBECF_STATUS_VIOLATION = 4,
  CUBECF_STATUS_IO = 5,
  // A value does not fit the requested C type.
  CUBECF_STATUS_OUT_OF_RANGE = 6,
  CUBECF_STATUS_PANIC = 7,
} CubecfStatus;

// A shortest-vector detection for one lattice index.
typedef struct CubecfDetection CubecfDetection;

// Partial quotients `b₀ … b_N` of `∛2 − 1` with their convergents.
typedef struct CubecfExpansion CubecfExpansion;

// Scalar summary of a detection.
typedef struct CubecfDetectionSummary {
  int64_t j;
  // `ρ^{−j/4}|a|`.
  double a_len;
  // `Δ = 3ρ^{−j/4}|a|`.
  double big_delta;
  bool proven;
  bool has_bound;
  // `⌊2/Δ² − 2⌋`, meaningful when `has_bound` is set.
  uint64_t bound;
  size_t trace_len;
} CubecfDetectionSummary;

// One Gauss reduction row with 64-bit entries.
typedef struct CubecfGaussRow {
  int64_t z1[3];
  int64_t z2[3];
  int64_t norm2;
  int64_t dot;
  int64_t k;
} CubecfGaussRow;

// Spectral and bound constants, rounded to double.
typedef struct CubecfConstants {
  double theta_deg;
  double m;
  double rho;
  double a;
  double b;
  double x0;
  double x_prime;
  double x_prime_low;
  double h_x_prime;
  double t3_bound;
  double a2_bound;
} CubecfConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer is
// valid until the next call into this library on the same thread.
const char *cubecf_last_error(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must be null or a string obtained from this library, not yet freed.
void cubecf_string_free(char *s);

// Expands through `b_{n_max}`.
//
// # Safety
// `out` must be valid for writing one pointer.
enum CubecfStatus cubecf_expansion_new(size_t n_max, struct CubecfExpansion **out);

// # Safety
// `h` must be null or a handle from [`cubecf_expansion_new`], not yet freed.
void cubecf_expansion_free(struct CubecfExpansion *h);

// Number of terms, `N + 1`.
//
// # Safety
// `h` must be a live handle and `out` valid for writing.
enum CubecfStatus cubecf_expansion_len(const struct CubecfExpansion *h, size_t *out);

// `b_n` as an unsigned 64-bit integer.
//
// # Safety
// `h` must be a live handle and `out` valid for writing.
enum CubecfStatus cubecf_expansion_quotient(const struct CubecfExpansion *h,
                                            size_t n,
                                            uint64_t *out);

// `p_n` and `q_n` as decimal strings, freed with [`cubecf_string_free`].
//
// # Safety
// `h` must be a live handle; `p` and `q` valid for writing one pointer each.
enum CubecfStatus cubecf_expansion_convergent(const struct CubecfExpansion *h,
                                              size_t n,
                                              char **p,
                                              char **q);

// Index `n` with `p_n/q_n = p/q`, or `-1`. `p` and `q` are decimal strings.
//
// # Safety
// `h` must be a live handle, `p` and `q` nul-terminated strings, `out`
// valid for writing.
enum CubecfStatus cubecf_expansion_index_of(const struct CubecfExpansion *h,
                                            const char *p,
                                            const char *q,
                                            int64_t *out);

// Runs detection at index `j >= 2`. A `precision` of 0 selects the default.
//
// # Safety
// `out` must be valid for writing one pointer.
enum CubecfStatus cubecf_detection_new(int64_t j,
                                       uint32_t precision_digits,
                                       struct CubecfDetection **out);

// # Safety
// `h` must be null or a handle from [`cubecf_detection_new`], not yet freed.
void cubecf_detection_free(struct CubecfDetection *h);

// The sign-normalized shortest vector.
//
// # Safety
// `h` must be a live handle and `out` valid for writing three values.
enum CubecfStatus cubecf_detection_vector(const struct CubecfDetection *h, int64_t *out);

// The shortest vector as text `(a1,a2,a3)`, freed with
// [`cubecf_string_free`]. Works at any size.
//
// # Safety
// `h` must be a live handle and `out` valid for writing one pointer.
enum CubecfStatus cubecf_detection_vector_text(const struct CubecfDetection *h, char **out);

// The recovered fraction as decimal strings, freed with [`cubecf_string_free`].
//
// # Safety
// `h` must be a live handle; `p` and `q` valid for writing one pointer each.
enum CubecfStatus cubecf_detection_fraction(const struct CubecfDetection *h, char **p, char **q);

// # Safety
// `h` must be a live handle and `out` valid for writing.
enum CubecfStatus cubecf_detection_summary(const struct CubecfDetection *h,
                                           struct CubecfDetectionSummary *out);

// Row `i` of the reduction trace.
//
// # Safety
// `h` must be a live handle and `out` valid for writing.
enum CubecfStatus cubecf_detection_trace_row(const struct CubecfDetection *h,
                                             size_t i,
                                             struct CubecfGaussRow *out);

// A `precision` of 0 selects the default.
//
// # Safety
// `out` must be valid for writing.
enum CubecfStatus cubecf_constants(uint32_t precision_digits, struct CubecfConstants *out);

// Gauss–Kuzmin probability of the value `k >= 1`.
//
// # Safety
// `out` must be valid for writing.
enum CubecfStatus cubecf_kuzmin_prob(uint64_t k, double *out);

// Upper tail of the χ² distribution.
//
// # Safety
// `out` must be valid for writing.
enum CubecfStatus cubecf_chi2_sf(double x2, size_t df, double *out);

// χ² test of counts for the cells `{1}, …, {R−1}, {≥R}`, `R = len >= 2`.
//
// # Safety
// `observed` must point to `len` readable values; `x2` and `p_value` must
// be valid for writing.
enum CubecfStatus cubecf_chi_square(const uint64_t *observed,
                                    size_t len,
                                    double *x2,
                                    double *p_value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CUBECF_H */
