#ifndef REGPOLAR_H
#define REGPOLAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of a library call.
typedef enum RpStatus {
  RP_STATUS_OK = 0,
  // A required pointer argument was null.
  RP_STATUS_NULL_ARGUMENT = 1,
  // Sizes, ranks or tolerances are out of range.
  RP_STATUS_INVALID_ARGUMENT = 2,
  // Data length or block shapes disagree with the profile.
  RP_STATUS_SHAPE_MISMATCH = 3,
  // A numerical routine failed, e.g. a singular defect `1 - F*F`.
  RP_STATUS_COMPUTATION = 4,
  // The library panicked; the handle arguments are unchanged.
  RP_STATUS_PANIC = 5,
} RpStatus;

// A bounded operator `A^k → A^m` over `A = ⊕ M_n(ℂ)`.
typedef struct RpOperator RpOperator;

typedef struct RpTolerances {
  // Identity residual tolerance.
  double identity;
  // Relative rank cut-off for singular values.
  double rank;
} RpTolerances;

// Verdicts of the polar / complement / generalized-inverse check.
typedef struct RpVerdicts {
  bool polar_exists;
  bool complemented;
  bool inverse_exists;
  double max_residual;
} RpVerdicts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Default tolerances: identity `1e-8`, rank `1e-10`.
struct RpTolerances rp_tolerances_default(void);

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *rp_last_error(void);

// Builds an operator from `num_blocks` block sizes and interleaved
// `(re, im)` data: blocks in profile order, each a row-major
// `(domain_rank·n) × (codomain_rank·n)` complex matrix.
//
// # Safety
// `profile` must point to `num_blocks` sizes and `data` to `data_len` doubles.
enum RpStatus rp_operator_new(const size_t *profile,
                              size_t num_blocks,
                              size_t domain_rank,
                              size_t codomain_rank,
                              const double *data,
                              size_t data_len,
                              struct RpOperator **out);

// Releases a handle; null is ignored.
//
// # Safety
// `op` must be null or a handle from this library that was not freed yet.
void rp_operator_free(struct RpOperator *op);

// Domain module rank `k`, or 0 for a null handle.
//
// # Safety
// `op` must be null or a live handle.
size_t rp_operator_domain_rank(const struct RpOperator *op);

// Codomain module rank `m`, or 0 for a null handle.
//
// # Safety
// `op` must be null or a live handle.
size_t rp_operator_codomain_rank(const struct RpOperator *op);

// Number of doubles written by [`rp_operator_copy_data`].
//
// # Safety
// `op` must be null or a live handle.
size_t rp_operator_data_len(const struct RpOperator *op);

// Operator norm (largest singular value over blocks), NaN for a null handle.
//
// # Safety
// `op` must be null or a live handle.
double rp_operator_norm(const struct RpOperator *op);

// Writes the interleaved data in the layout accepted by [`rp_operator_new`].
//
// # Safety
// `op` must be a live handle and `buf` must hold `buf_len` doubles.
enum RpStatus rp_operator_copy_data(const struct RpOperator *op, double *buf, size_t buf_len);

// Polar decomposition `t = V|t|`; writes new handles for `V` and `|t|`.
//
// # Safety
// `op` must be a live handle, `tol` null or valid, outputs writable.
enum RpStatus rp_polar(const struct RpOperator *op,
                       const struct RpTolerances *tol,
                       struct RpOperator **out_v,
                       struct RpOperator **out_abs);

// Moore-Penrose generalized inverse `s`.
//
// # Safety
// `op` must be a live handle, `tol` null or valid, `out_s` writable.
enum RpStatus rp_pinv(const struct RpOperator *op,
                      const struct RpTolerances *tol,
                      struct RpOperator **out_s);

// Bounded transform `F_t = t(1 + t*t)^{-1/2}`.
//
// # Safety
// `op` must be a live handle, `tol` null or valid, `out_f` writable.
enum RpStatus rp_btransform(const struct RpOperator *op,
                            const struct RpTolerances *tol,
                            struct RpOperator **out_f);

// Inverse transform `t = F(1 - F*F)^{-1/2}`; fails with
// [`RpStatus::Computation`] when `1 - F*F` is singular.
//
// # Safety
// `f` must be a live handle, `tol` null or valid, `out_t` writable.
enum RpStatus rp_inverse_btransform(const struct RpOperator *f,
                                    const struct RpTolerances *tol,
                                    struct RpOperator **out_t);

// Decides the three equivalent conditions and reports the largest identity residual.
//
// # Safety
// `op` must be a live handle, `tol` null or valid, `out` writable.
enum RpStatus rp_verify(const struct RpOperator *op,
                        const struct RpTolerances *tol,
                        struct RpVerdicts *out);

// Runs a command-line command (`"polar"`, `"verify-thm31"`, ...) on a
// problem file given as a json string and stores the json report in
// `*out_json`, to be released with [`rp_string_free`]. `tol <= 0` keeps the
// default or file tolerance.
//
// Returns the command-line exit code (0 analysis completed, 2 input or
// computation error), or -1 when an argument is null or not UTF-8.
//
// # Safety
// `command` and `problem_json` must be null-terminated strings; `out_json` writable.
int32_t rp_run_json(const char *command, const char *problem_json, double tol, char **out_json);

// Releases a string returned by the library; null is ignored.
//
// # Safety
// `s` must be null or a string from [`rp_run_json`] that was not freed yet.
void rp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* REGPOLAR_H */
