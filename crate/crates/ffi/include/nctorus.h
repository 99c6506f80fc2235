#ifndef NCTORUS_H
#define NCTORUS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum NctStatus {
  NCT_STATUS_OK = 0,
  NCT_STATUS_NULL_POINTER = 1,
  NCT_STATUS_INVALID_ARGUMENT = 2,
  NCT_STATUS_OUT_OF_BOX = 3,
  /**
   * Aliasing, route disagreement, singular block or a failed inverse solve.
   */
  NCT_STATUS_NUMERICAL = 4,
  NCT_STATUS_ALPHA_MISMATCH = 5,
  NCT_STATUS_IO = 6,
  NCT_STATUS_PANIC = 7,
} NctStatus;

/**
 * A circle diffeomorphism given by its conjugator lift and angle.
 */
typedef struct NctDiffeo NctDiffeo;

/**
 * A truncated GNS space. Dirac coefficients are computed on first use.
 */
typedef struct NctSpace NctSpace;

/**
 * A finitely supported element of the Weyl algebra.
 */
typedef struct NctWeyl NctWeyl;

typedef struct NctComplex {
  double re;
  double im;
} NctComplex;

/**
 * Both evaluations of the state on an element.
 */
typedef struct NctStateValue {
  struct NctComplex series;
  struct NctComplex gns;
} NctStateValue;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, empty after a success.
 * Valid until the next `nct_*` call on the same thread.
 */
const char *nct_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *nct_version(void);

/**
 * The benchmark diffeomorphism `H(x) = x + (0.3/2π) sin 2πx` with `α = (√5 − 1)/4`.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one handle.
 */
enum NctStatus nct_diffeo_benchmark(struct NctDiffeo **out);

/**
 * Diffeomorphism with conjugator `H(x) = x + Σ s_k sin 2πkx + Σ c_k (cos 2πkx − 1)`.
 *
 * # Safety
 * `sin` and `cos` must point to `n_sin` and `n_cos` readable doubles (or be
 * null when the count is zero); `out` must be writable.
 */
enum NctStatus nct_diffeo_new(const double *sin,
                              size_t n_sin,
                              const double *cos,
                              size_t n_cos,
                              double alpha,
                              struct NctDiffeo **out);

/**
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum NctStatus nct_diffeo_alpha(const struct NctDiffeo *d, double *out);

/**
 * `F_n(x)/n`, an estimate of the rotation number `2α`.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum NctStatus nct_diffeo_rotation_number(const struct NctDiffeo *d,
                                          size_t iterations,
                                          double *out);

/**
 * Radon-Nikodym derivative `δ_n(x)`.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum NctStatus nct_diffeo_radon_nikodym(const struct NctDiffeo *d,
                                        int64_t n,
                                        double x,
                                        double *out);

/**
 * # Safety
 * `d` must be null or a handle not yet freed.
 */
void nct_diffeo_free(struct NctDiffeo *d);

/**
 * The zero element at deformation angle `alpha`.
 *
 * # Safety
 * `out` must be writable.
 */
enum NctStatus nct_weyl_new(double alpha, struct NctWeyl **out);

/**
 * Sets the coefficient of `U^m V^n`.
 *
 * # Safety
 * `w` must be a live handle.
 */
enum NctStatus nct_weyl_set(struct NctWeyl *w, int64_t m, int64_t n, struct NctComplex value);

/**
 * # Safety
 * `w` must be a live handle; `out` must be writable.
 */
enum NctStatus nct_weyl_get(const struct NctWeyl *w, int64_t m, int64_t n, struct NctComplex *out);

/**
 * Star product `f ⋆ g` as a new handle.
 *
 * # Safety
 * `f`, `g` must be live handles; `out` must be writable.
 */
enum NctStatus nct_weyl_star(const struct NctWeyl *f,
                             const struct NctWeyl *g,
                             struct NctWeyl **out);

/**
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum NctStatus nct_weyl_involution(const struct NctWeyl *f, struct NctWeyl **out);

/**
 * # Safety
 * `f` must be a live handle; `out` must be writable.
 */
enum NctStatus nct_weyl_trace(const struct NctWeyl *f, struct NctComplex *out);

/**
 * # Safety
 * `w` must be null or a handle not yet freed.
 */
void nct_weyl_free(struct NctWeyl *w);

/**
 * Truncated GNS space with blocks `|k| ≤ k_bound`, modes `|l| ≤ m_bound` and
 * `grid` quadrature nodes. The diffeomorphism is copied.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum NctStatus nct_space_new(const struct NctDiffeo *d,
                             size_t k_bound,
                             size_t m_bound,
                             size_t grid,
                             struct NctSpace **out);

/**
 * Dimension `(2K+1)(2M+1)`; the length of coefficient tables.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum NctStatus nct_space_dim(const struct NctSpace *s, size_t *out);

/**
 * # Safety
 * `s` must be null or a handle not yet freed.
 */
void nct_space_free(struct NctSpace *s);

/**
 * `‖JΔ^{1/2}π(f)ξ − π(f*)ξ‖`.
 *
 * # Safety
 * `s`, `f` must be live handles; `out` must be writable.
 */
enum NctStatus nct_tomita_check(const struct NctSpace *s, const struct NctWeyl *f, double *out);

/**
 * `ω(W(f))` by the moment series and by the GNS inner product.
 *
 * # Safety
 * `s`, `f` must be live handles; `out` must be writable.
 */
enum NctStatus nct_state_eval(const struct NctSpace *s,
                              const struct NctWeyl *f,
                              struct NctStateValue *out);

/**
 * Hat (`paren = false`) or paren table of `f`, written to `out[0..len]` with
 * entry `(k, l)` at index `(k + K)(2M + 1) + (l + M)`. `len` must equal the space dimension.
 *
 * # Safety
 * `s`, `f` must be live handles; `out` must point to `len` writable values.
 */
enum NctStatus nct_fourier_table(const struct NctSpace *s,
                                 const struct NctWeyl *f,
                                 bool paren,
                                 struct NctComplex *out,
                                 size_t len);

/**
 * Dirac matrix element `⟨D^(η) b^{kl}, b^{rs}⟩` for `η ∈ {0, 1/2, 1}` by the
 * closed form and by the quadrature oracle. Either output may be null.
 *
 * # Safety
 * `s` must be a live handle; non-null outputs must be writable.
 */
enum NctStatus nct_dirac_matrix_element(const struct NctSpace *s,
                                        double eta,
                                        int64_t k,
                                        int64_t l,
                                        int64_t r,
                                        int64_t q,
                                        struct NctComplex *closed,
                                        struct NctComplex *oracle);

/**
 * Dirac coefficient `a_n`.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum NctStatus nct_dirac_coefficient(const struct NctSpace *s, int64_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* NCTORUS_H */
