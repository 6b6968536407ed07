#ifndef RETROVIR_H
#define RETROVIR_H

/* Generated by cbindgen from crates/ffi. Do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code returned by every fallible function.
 */
typedef enum RvStatus {
  RV_STATUS_OK = 0,
  /**
   * The parameters admit no equilibrium with all coordinates positive.
   */
  RV_STATUS_NO_INNER_EQUILIBRIUM = 1,
  RV_STATUS_INVALID_ARGUMENT = 2,
  RV_STATUS_NULL_POINTER = 3,
  /**
   * A Lyapunov quantity was requested at a non-positive state.
   */
  RV_STATUS_DOMAIN_ERROR = 4,
  RV_STATUS_INTEGRATION_FAILED = 5,
  RV_STATUS_INDEX_OUT_OF_RANGE = 6,
  /**
   * The requested object does not exist (no Lyapunov weights, empty
   * stable region, ...).
   */
  RV_STATUS_NOT_FOUND = 7,
  RV_STATUS_BUFFER_TOO_SMALL = 8,
  RV_STATUS_PANIC = 99,
} RvStatus;

typedef enum RvEquilibriumKind {
  RV_EQUILIBRIUM_KIND_INNER = 0,
  RV_EQUILIBRIUM_KIND_EXTINCTION = 1,
  RV_EQUILIBRIUM_KIND_UNINFECTED_ONLY = 2,
  RV_EQUILIBRIUM_KIND_INFECTED_ONLY = 3,
} RvEquilibriumKind;

typedef enum RvVerdict {
  RV_VERDICT_STABLE = 0,
  RV_VERDICT_UNSTABLE = 1,
  RV_VERDICT_MARGINAL = 2,
  /**
   * No inner equilibrium to classify.
   */
  RV_VERDICT_NONE = 3,
} RvVerdict;

typedef enum RvCondition4Variant {
  RV_CONDITION4_VARIANT_CORRECTED = 0,
  RV_CONDITION4_VARIANT_AS_WRITTEN = 1,
} RvCondition4Variant;

typedef enum RvIntegrationMode {
  RV_INTEGRATION_MODE_FIXED_RK4 = 0,
  RV_INTEGRATION_MODE_ADAPTIVE_RK4 = 1,
} RvIntegrationMode;

/**
 * A validated parameter set together with its inner equilibrium, if any.
 */
typedef struct RvModel RvModel;

/**
 * Result of a parameter sweep over `(alpha, k)`.
 */
typedef struct RvSweep RvSweep;

/**
 * Result of an integration run.
 */
typedef struct RvTrajectory RvTrajectory;

/**
 * Model constants; field names follow the configuration keys.
 */
typedef struct RvParams {
  double a;
  double a_i;
  double b11;
  double b12;
  double b21;
  double b22;
  double alpha;
  double m;
  double k;
  double sigma;
} RvParams;

/**
 * `(C, I, V)` triple; also used for derivatives.
 */
typedef struct RvState {
  double c;
  double i;
  double v;
} RvState;

typedef struct RvEquilibrium {
  struct RvState point;
  enum RvEquilibriumKind kind;
  double residual;
} RvEquilibrium;

/**
 * Characteristic cubic `λ³ + pλ² + qλ + r` with its Routh–Hurwitz verdict.
 */
typedef struct RvStabilityReport {
  double p;
  double q;
  double r;
  enum RvVerdict verdict;
  double margin_p;
  double margin_r;
  double margin_pq_minus_r;
} RvStabilityReport;

typedef struct RvCondition4 {
  double lhs;
  double rhs;
  bool holds;
  enum RvCondition4Variant variant;
} RvCondition4;

typedef struct RvLyapunovCoeffs {
  double a;
  double b;
  double d;
} RvLyapunovCoeffs;

/**
 * Symmetric form in `(V, I, C)` deviation order with its leading minors.
 */
typedef struct RvOmegaForm {
  double w11;
  double w22;
  double w33;
  double w12;
  double w13;
  double w23;
  struct RvState evaluated_at;
  double d1;
  double d2;
  double d3;
} RvOmegaForm;

typedef struct RvIntegrationOptions {
  double t_end;
  double dt;
  double rel_tol;
  double abs_tol;
  enum RvIntegrationMode mode;
  uint64_t max_steps;
} RvIntegrationOptions;

typedef struct RvSweepCell {
  double alpha;
  double k;
  bool inner_exists;
  enum RvVerdict rh_verdict;
  bool sylvester_pd;
  bool cond4_as_written;
  bool cond4_corrected;
} RvSweepCell;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Static description of a status code. Never null; do not free.
 */
const char *rv_status_message(enum RvStatus status);

/**
 * Message for the last error raised on this thread, or an empty string.
 *
 * The pointer stays valid until the next `rv_*` call on the same thread.
 */
const char *rv_last_error(void);

/**
 * Validates `params` and solves for the inner equilibrium.
 *
 * A model is created even when no inner equilibrium exists; the functions
 * that need one then return `NoInnerEquilibrium`.
 *
 * # Safety
 * `params` must point to a readable `RvParams` and `out` to writable
 * storage for one pointer.
 */
enum RvStatus rv_model_new(const struct RvParams *params, struct RvModel **out);

/**
 * # Safety
 * `model` must be null or a handle from [`rv_model_new`] not yet freed.
 */
void rv_model_free(struct RvModel *model);

/**
 * Copies the model's parameters into `out`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RvStatus rv_model_params(const struct RvModel *model, struct RvParams *out);

/**
 * Right-hand side `(C', I', V')` at `state`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RvStatus rv_vector_field(const struct RvModel *model,
                              struct RvState state,
                              struct RvState *out);

/**
 * Jacobian at `state`, row-major in `(C, I, V)` order.
 *
 * # Safety
 * `model` must be a live handle and `out` must point to 9 writable doubles.
 */
enum RvStatus rv_jacobian(const struct RvModel *model, struct RvState state, double *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RvStatus rv_inner_equilibrium(const struct RvModel *model, struct RvEquilibrium *out);

/**
 * Writes the boundary equilibria into `out[0..capacity]` and their number
 * into `len`.
 *
 * When `capacity` is too small nothing is copied, `len` still receives the
 * required count and `BufferTooSmall` is returned. `out` may be null when
 * `capacity` is zero.
 *
 * # Safety
 * `model` must be a live handle, `len` writable, and `out` valid for
 * `capacity` writes.
 */
enum RvStatus rv_boundary_equilibria(const struct RvModel *model,
                                     struct RvEquilibrium *out,
                                     size_t capacity,
                                     size_t *len);

/**
 * Routh–Hurwitz verdict for `λ³ + pλ² + qλ + r`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RvStatus rv_routh_hurwitz(double p, double q, double r, struct RvStabilityReport *out);

/**
 * Linear stability of the inner equilibrium.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RvStatus rv_classify_inner(const struct RvModel *model, struct RvStabilityReport *out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RvStatus rv_condition4(const struct RvModel *model,
                            enum RvCondition4Variant variant,
                            struct RvCondition4 *out);

/**
 * Searches the default weight grid for `(A, B, D)` making the form
 * positive definite. Returns `NotFound` when no grid point works.
 *
 * # Safety
 * `model` must be a live handle; `coeffs` must be writable; `form` may be
 * null.
 */
enum RvStatus rv_search_coeffs(const struct RvModel *model,
                               struct RvLyapunovCoeffs *coeffs,
                               struct RvOmegaForm *form);

/**
 * Quadratic form of `-Ẇ` evaluated at `state`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RvStatus rv_omega_at(const struct RvModel *model,
                          struct RvLyapunovCoeffs coeffs,
                          struct RvState state,
                          struct RvOmegaForm *out);

/**
 * Lyapunov function `W` at `state`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RvStatus rv_w_value(const struct RvModel *model,
                         struct RvLyapunovCoeffs coeffs,
                         struct RvState state,
                         double *out);

/**
 * Time derivative of `W` along the flow at `state`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RvStatus rv_w_dot(const struct RvModel *model,
                       struct RvLyapunovCoeffs coeffs,
                       struct RvState state,
                       double *out);

/**
 * Default integration options: fixed-step RK4, `t_end = 10`, `dt = 0.01`.
 */
struct RvIntegrationOptions rv_integration_defaults(void);

/**
 * Integrates from `initial` over `[0, opts.t_end]`.
 *
 * # Safety
 * `model` must be a live handle, `opts` readable and `out` writable.
 * Free the result with [`rv_trajectory_free`].
 */
enum RvStatus rv_integrate(const struct RvModel *model,
                           struct RvState initial,
                           const struct RvIntegrationOptions *opts,
                           struct RvTrajectory **out);

/**
 * Like [`rv_integrate`] but also records `(W, Ẇ)` at every sample.
 *
 * # Safety
 * Same as [`rv_integrate`].
 */
enum RvStatus rv_lyapunov_trace(const struct RvModel *model,
                                struct RvLyapunovCoeffs coeffs,
                                struct RvState initial,
                                const struct RvIntegrationOptions *opts,
                                struct RvTrajectory **out);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `traj` must be null or a live handle.
 */
size_t rv_trajectory_len(const struct RvTrajectory *traj);

/**
 * Reads sample `index`. `w` and `w_dot` may be null; they are set to NaN
 * when the trajectory carries no Lyapunov samples.
 *
 * # Safety
 * `traj` must be a live handle; non-null out-pointers must be writable.
 */
enum RvStatus rv_trajectory_sample(const struct RvTrajectory *traj,
                                   size_t index,
                                   double *t,
                                   struct RvState *state,
                                   double *w,
                                   double *w_dot);

/**
 * # Safety
 * `traj` must be null or a handle not yet freed.
 */
void rv_trajectory_free(struct RvTrajectory *traj);

/**
 * Evaluates every `(alpha, k)` cell with the model's other parameters held
 * fixed.
 *
 * # Safety
 * `model` must be a live handle, `alphas` and `ks` valid for `n_alpha` and
 * `n_k` reads, and `out` writable. Free the result with [`rv_sweep_free`].
 */
enum RvStatus rv_sweep(const struct RvModel *model,
                       const double *alphas,
                       size_t n_alpha,
                       const double *ks,
                       size_t n_k,
                       struct RvSweep **out);

/**
 * # Safety
 * `sweep` must be a live handle; `n_alpha` and `n_k` writable.
 */
enum RvStatus rv_sweep_shape(const struct RvSweep *sweep, size_t *n_alpha, size_t *n_k);

/**
 * # Safety
 * `sweep` must be a live handle and `out` writable.
 */
enum RvStatus rv_sweep_cell(const struct RvSweep *sweep,
                            size_t alpha_index,
                            size_t k_index,
                            struct RvSweepCell *out);

/**
 * Corner `(alpha0, k0)` of the largest stable rectangle anchored at the
 * smallest grid values. `NotFound` when the first cell is not stable.
 *
 * # Safety
 * `sweep` must be a live handle; `alpha0` and `k0` writable.
 */
enum RvStatus rv_sweep_margins(const struct RvSweep *sweep, double *alpha0, double *k0);

/**
 * # Safety
 * `sweep` must be null or a handle not yet freed.
 */
void rv_sweep_free(struct RvSweep *sweep);

/**
 * Largest `alpha` in `(0, alpha_hi]` below which the inner equilibrium
 * stays stable at `k = k_fixed`, to relative precision `1e-6`.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum RvStatus rv_find_alpha_margin(const struct RvModel *model,
                                   double k_fixed,
                                   double alpha_hi,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RETROVIR_H */
