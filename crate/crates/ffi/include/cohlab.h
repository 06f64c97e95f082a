#ifndef COHLAB_H
#define COHLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CohStatus {
  COH_STATUS_OK = 0,
  COH_STATUS_NULL_POINTER = 1,
  COH_STATUS_INVALID_ARGUMENT = 2,
  COH_STATUS_VALIDATION = 3,
  COH_STATUS_DOMAIN = 4,
  COH_STATUS_PRECONDITION = 5,
  COH_STATUS_RESOURCE_LIMIT = 6,
  COH_STATUS_IO = 7,
  COH_STATUS_JSON = 8,
  COH_STATUS_PANIC = 9,
} CohStatus;

/**
 * Opaque quantum state (pure or mixed).
 */
typedef struct CohState CohState;

/**
 * Opaque Grover trajectory.
 */
typedef struct CohTrajectory CohTrajectory;

typedef struct CohMonotones {
  size_t dim;
  size_t coherence_number;
  /**
   * 1 when the coherence number is exact, 0 when only bounds are known.
   */
  int32_t coherence_number_exact;
  size_t coherence_number_lower;
  size_t coherence_number_upper;
  double cc;
  double ccn;
  double l1;
  double rel_entropy;
  /**
   * 1 when `cc` and `ccn` are convex-roof upper-bound estimates.
   */
  int32_t roof_estimates;
} CohMonotones;

typedef struct CohGroverPoint {
  double r;
  double alpha_r;
  double success_probability;
  double ccn;
  double ccn_derivative;
} CohGroverPoint;

typedef struct CohTrajectoryPoint {
  double r;
  double alpha_r;
  double success_probability;
  size_t coherence_number;
  double ccn;
  double l1;
  double rel_entropy;
  /**
   * 0 at `r = 0`, where `w` is undefined.
   */
  int32_t has_w;
  double w;
} CohTrajectoryPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next call into the library on the same thread.
 */
const char *coh_last_error_message(void);

const char *coh_version(void);

/**
 * Frees a string returned by this library.
 *
 * # Safety
 * `s` must come from this library and not be freed twice.
 */
void coh_string_free(char *s);

/**
 * Pure state from `dim` amplitudes; `im` may be null for real input.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to `dim` doubles; `out` must be valid.
 */
enum CohStatus coh_state_from_amplitudes(const double *re,
                                         const double *im,
                                         size_t dim,
                                         struct CohState **out);

/**
 * Density matrix from row-major `dim * dim` entries; `im` may be null.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to `dim * dim` doubles; `out` must be valid.
 */
enum CohStatus coh_state_from_density(const double *re,
                                      const double *im,
                                      size_t dim,
                                      struct CohState **out);

/**
 * State from the JSON state-file format.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be valid.
 */
enum CohStatus coh_state_from_json(const char *json, struct CohState **out);

/**
 * # Safety
 * `state` must come from a `coh_state_*` constructor and not be freed twice.
 */
void coh_state_free(struct CohState *state);

/**
 * # Safety
 * `state` and `out` must be valid.
 */
enum CohStatus coh_state_dim(const struct CohState *state, size_t *out);

/**
 * Coherence monotones of `state`; `seed` drives the convex-roof restarts.
 *
 * # Safety
 * `state` and `out` must be valid.
 */
enum CohStatus coh_monotones(const struct CohState *state, uint64_t seed, struct CohMonotones *out);

/**
 * Full coherence report as JSON; release with `coh_string_free`.
 *
 * # Safety
 * `state` and `out` must be valid.
 */
enum CohStatus coh_monotones_json(const struct CohState *state, uint64_t seed, char **out);

/**
 * `C_k` of a pure state on `d ⊗ d` (dimension `d²`).
 *
 * # Safety
 * `state` and `out` must be valid.
 */
enum CohStatus coh_k_concurrence(const struct CohState *state, size_t k, double *out);

/**
 * Specht ratio `S(eps)` for `0 < eps <= 1`.
 *
 * # Safety
 * `out` must be valid.
 */
enum CohStatus coh_specht_ratio(double eps, double *out);

/**
 * Closed-form Grover quantities at real iteration `r`.
 *
 * # Safety
 * `out` must be valid.
 */
enum CohStatus coh_grover_point(size_t n_items,
                                size_t n_targets,
                                double r,
                                struct CohGroverPoint *out);

/**
 * Critical iteration `r*`; `integer_hit` is set to 1 when `r*` is an integer.
 *
 * # Safety
 * `r_star` and `integer_hit` must be valid.
 */
enum CohStatus coh_grover_critical(size_t n_items,
                                   size_t n_targets,
                                   double *r_star,
                                   int32_t *integer_hit);

/**
 * Cost performance `w` at success probability `p`, exact and large-`N` forms.
 *
 * # Safety
 * `exact` and `asymptotic` must be valid.
 */
enum CohStatus coh_grover_cost_performance(size_t n_items,
                                           size_t n_targets,
                                           double p,
                                           double *exact,
                                           double *asymptotic);

/**
 * Integer trajectory `r = 0..=r_max`.
 *
 * # Safety
 * `out` must be valid.
 */
enum CohStatus coh_grover_trajectory(size_t n_items,
                                     size_t n_targets,
                                     size_t r_max,
                                     struct CohTrajectory **out);

/**
 * # Safety
 * `t` must come from `coh_grover_trajectory` and not be freed twice.
 */
void coh_trajectory_free(struct CohTrajectory *t);

/**
 * # Safety
 * `t` and `out` must be valid.
 */
enum CohStatus coh_trajectory_len(const struct CohTrajectory *t, size_t *out);

/**
 * # Safety
 * `t` and `out` must be valid.
 */
enum CohStatus coh_trajectory_point(const struct CohTrajectory *t,
                                    size_t index,
                                    struct CohTrajectoryPoint *out);

/**
 * Trajectory as CSV; release with `coh_string_free`.
 *
 * # Safety
 * `t` and `out` must be valid.
 */
enum CohStatus coh_trajectory_csv(const struct CohTrajectory *t, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COHLAB_H */
