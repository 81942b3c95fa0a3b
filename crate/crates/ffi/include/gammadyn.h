#ifndef GAMMADYN_H
#define GAMMADYN_H

#include <stddef.h>
#include <stdint.h>

typedef enum GdStatus {
  GD_STATUS_OK = 0,
  GD_STATUS_NULL_POINTER = 1,
  GD_STATUS_DIMENSION = 2,
  GD_STATUS_NON_FINITE = 3,
  GD_STATUS_INVALID_TOLERANCE = 4,
  GD_STATUS_NO_CONVERGENCE = 5,
  GD_STATUS_SINGULAR = 6,
  GD_STATUS_SPECTRUM_NOT_REAL = 7,
  GD_STATUS_DEGENERATE = 8,
  GD_STATUS_TRUNCATION = 9,
  GD_STATUS_CONTRACT = 10,
  GD_STATUS_INTERNAL = 11,
  GD_STATUS_PANIC = 12,
} GdStatus;

// Opaque square complex matrix.
typedef struct GdMatrix GdMatrix;

// Opaque biorthogonal system with its metric operators.
typedef struct GdSystem GdSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Builds an `n × n` matrix from `2·n·n` interleaved doubles.
//
// # Safety
// `data` must point to `2·n·n` readable doubles and `out` to a writable
// pointer.
enum GdStatus gd_matrix_new(size_t n, const double *data, struct GdMatrix **out);

// # Safety
// `m` must be null or a handle from this library not yet freed.
void gd_matrix_free(struct GdMatrix *m);

// Dimension of `m`, or 0 for null.
//
// # Safety
// `m` must be null or a live handle.
size_t gd_matrix_dimension(const struct GdMatrix *m);

// Copies the entries into `out`, which must hold `len ≥ 2·n·n` doubles.
//
// # Safety
// `out` must point to `len` writable doubles.
enum GdStatus gd_matrix_read(const struct GdMatrix *m, double *out, size_t len);

// `γ^t(X) = e^{iH†t} X e^{−iHt}`.
//
// # Safety
// `h` and `x` must be live handles and `out` writable.
enum GdStatus gd_gamma_t(const struct GdMatrix *h,
                         const struct GdMatrix *x,
                         double t,
                         struct GdMatrix **out);

// `γ^t(X)` by its power series; `terms` (may be null) receives the
// number of terms summed.
//
// # Safety
// `h` and `x` must be live handles and `out` writable.
enum GdStatus gd_gamma_series(const struct GdMatrix *h,
                              const struct GdMatrix *x,
                              double t,
                              double series_tol,
                              struct GdMatrix **out,
                              size_t *terms);

// `δ_γ(X) = i(H†X − XH)`.
//
// # Safety
// `h` and `x` must be live handles and `out` writable.
enum GdStatus gd_delta_gamma(const struct GdMatrix *h,
                             const struct GdMatrix *x,
                             struct GdMatrix **out);

// Biorthogonal eigensystem and metric of `h` with default tolerances.
//
// # Safety
// `h` must be a live handle and `out` writable.
enum GdStatus gd_system_analyze(const struct GdMatrix *h, struct GdSystem **out);

// # Safety
// `s` must be null or a handle from this library not yet freed.
void gd_system_free(struct GdSystem *s);

// Ascending eigenvalues into `out[0..len]`, `len ≥ n`.
//
// # Safety
// `s` must be a live handle and `out` point to `len` writable doubles.
enum GdStatus gd_system_eigenvalues(const struct GdSystem *s, double *out, size_t len);

// The metric `S_Ψ = Σ_k |Ψ_k⟩⟨Ψ_k|`.
//
// # Safety
// `s` must be a live handle and `out` writable.
enum GdStatus gd_system_metric(const struct GdSystem *s, struct GdMatrix **out);

// Writes 1 to `is_symmetry` when `γ^t(X) = X` for all `t`, else 0.
//
// # Safety
// `s` and `x` must be live handles and `is_symmetry` writable.
enum GdStatus gd_symmetry_check(const struct GdSystem *s,
                                const struct GdMatrix *x,
                                int32_t *is_symmetry);

// Message of the last failed call on this thread; empty after a
// successful call. Valid until the next call into the library.
const char *gd_last_error_message(void);

// Library version, a static NUL-terminated string.
const char *gd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAMMADYN_H */
