#ifndef CLAIMNORM_H
#define CLAIMNORM_H

/* Generated by cbindgen from claimnorm-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible function.
typedef enum ClaimnormStatus {
  CLAIMNORM_OK = 0,
  CLAIMNORM_NULL_POINTER = 1,
  CLAIMNORM_INVALID_UTF8 = 2,
  CLAIMNORM_INVALID_ARGUMENT = 3,
} ClaimnormStatus;

// Opaque METEOR scorer handle.
typedef struct ClaimnormMeteor ClaimnormMeteor;

// Per-pair METEOR components.
typedef struct ClaimnormMeteorBreakdown {
  uintptr_t matches;
  uintptr_t chunks;
  double precision;
  double recall;
  double fmean;
  double penalty;
  double score;
} ClaimnormMeteorBreakdown;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Scorer with default parameters (alpha 0.9, beta 3, gamma 0.5, exact and
// stem stages). Free with `claimnorm_meteor_free`.
struct ClaimnormMeteor *claimnorm_meteor_new(void);

// Scorer with explicit parameters. Returns NULL when alpha is outside
// (0, 1), beta is not positive, or gamma is outside [0, 1].
struct ClaimnormMeteor *claimnorm_meteor_new_with(double alpha, double beta, double gamma);

// # Safety
// `scorer` must be a pointer returned by one of the constructors above and
// not yet freed; NULL is ignored.
void claimnorm_meteor_free(struct ClaimnormMeteor *scorer);

// Score one hypothesis against one reference, writing the breakdown to
// `out`.
//
// # Safety
// `scorer` must be a live scorer handle; `hypothesis` and `reference` must
// be NUL-terminated strings; `out` must point to writable memory.
enum ClaimnormStatus claimnorm_meteor_score(const struct ClaimnormMeteor *scorer,
                                            const char *hypothesis,
                                            const char *reference,
                                            struct ClaimnormMeteorBreakdown *out);

// Porter-stem one lowercase word into `out`.
//
// # Safety
// `word` must be a NUL-terminated string; `out` must be writable. The
// result is freed with `claimnorm_string_free`.
enum ClaimnormStatus claimnorm_porter_stem(const char *word, char **out);

// Clean a raw model response into a claim string (label stripping, marker
// cut, whitespace collapse).
//
// # Safety
// As for `claimnorm_porter_stem`.
enum ClaimnormStatus claimnorm_postprocess_claim(const char *raw, char **out);

// Truncate text at `limit` Unicode scalar values, dropping any trailing
// partial word (the regurgitation baseline transform).
//
// # Safety
// As for `claimnorm_porter_stem`.
enum ClaimnormStatus claimnorm_truncate_baseline(const char *text, uintptr_t limit, char **out);

// # Safety
// `s` must be a string returned by this library and not yet freed; NULL is
// ignored.
void claimnorm_string_free(char *s);

// Library version as a static string; do not free.
const char *claimnorm_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLAIMNORM_H */
