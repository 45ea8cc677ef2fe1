#ifndef TEMPORANK_H
#define TEMPORANK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TrPersonalization {
  TR_PERSONALIZATION_UNIFORM = 0,
  TR_PERSONALIZATION_INPUT = 1,
  TR_PERSONALIZATION_INVERSE_INPUT = 2,
} TrPersonalization;

typedef enum TrSolver {
  TR_SOLVER_AUTO = 0,
  TR_SOLVER_DIRECT = 1,
  TR_SOLVER_POWER = 2,
} TrSolver;

typedef enum TrStatus {
  TR_STATUS_OK = 0,
  TR_STATUS_INVALID_INPUT = 1,
  TR_STATUS_NOT_FOUND = 2,
  TR_STATUS_PARSE = 3,
  TR_STATUS_SCHEDULE_RANGE = 4,
  TR_STATUS_CONVERGENCE = 5,
  TR_STATUS_INTEGRATION = 6,
  TR_STATUS_UNDEFINED_TAU = 7,
  TR_STATUS_IO = 8,
  TR_STATUS_INTERNAL = 9,
  TR_STATUS_NULL_POINTER = 10,
  TR_STATUS_PANIC = 11,
} TrStatus;

/**
 * Opaque network handle.
 */
typedef struct TrNetwork TrNetwork;

/**
 * Opaque trajectory handle.
 */
typedef struct TrTrajectory TrTrajectory;

/**
 * Model and solver settings. Start from [`tr_options_default`].
 */
typedef struct TrOptions {
  /**
   * Decay rate of the exponential kernel.
   */
  double alpha;
  /**
   * Constant damping factor in (0, 1).
   */
  double damping;
  enum TrPersonalization personalization;
  enum TrSolver solver;
  double tol;
  size_t max_iter;
  /**
   * Evaluation grid size for continuous networks.
   */
  size_t grid_points;
  /**
   * When non-zero, continuous networks are replaced by their truncation
   * on this many partition points.
   */
  size_t truncate;
} TrOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into this library on the same thread.
 */
const char *tr_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *tr_version(void);

struct TrOptions tr_options_default(void);

/**
 * Loads a network description file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum TrStatus tr_network_load(const char *path, struct TrNetwork **out);

/**
 * Builds a named preset such as `paper-synthetic`.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum TrStatus tr_network_preset(const char *name, struct TrNetwork **out);

/**
 * # Safety
 * `net` must come from a `tr_network_*` constructor and not be freed yet;
 * null is ignored.
 */
void tr_network_free(struct TrNetwork *net);

/**
 * # Safety
 * `net` must be a live handle; `out` must be writable.
 */
enum TrStatus tr_network_node_count(const struct TrNetwork *net, size_t *out);

/**
 * Writes 1 for a continuous network, 0 for a discrete one.
 *
 * # Safety
 * `net` must be a live handle; `out` must be writable.
 */
enum TrStatus tr_network_is_continuous(const struct TrNetwork *net, int32_t *out);

/**
 * Computes the PageRank trajectory of `net`.
 *
 * # Safety
 * `net` and `opts` must be valid pointers; `out` must be writable.
 */
enum TrStatus tr_trajectory_compute(const struct TrNetwork *net,
                                    const struct TrOptions *opts,
                                    struct TrTrajectory **out);

/**
 * # Safety
 * `traj` must come from [`tr_trajectory_compute`] and not be freed yet;
 * null is ignored.
 */
void tr_trajectory_free(struct TrTrajectory *traj);

/**
 * Number of instants in the trajectory.
 *
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum TrStatus tr_trajectory_len(const struct TrTrajectory *traj, size_t *out);

/**
 * Number of nodes per score vector.
 *
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum TrStatus tr_trajectory_node_count(const struct TrTrajectory *traj, size_t *out);

/**
 * Time of instant `k` (0-based).
 *
 * # Safety
 * `traj` must be a live handle; `out` must be writable.
 */
enum TrStatus tr_trajectory_instant(const struct TrTrajectory *traj, size_t k, double *out);

/**
 * Copies the scores at instant `k` into `buf`, which must hold at least
 * the node count.
 *
 * # Safety
 * `traj` must be a live handle; `buf` must point to `len` writable doubles.
 */
enum TrStatus tr_trajectory_scores(const struct TrTrajectory *traj,
                                   size_t k,
                                   double *buf,
                                   size_t len);

/**
 * Localization interval of `node` (0-based) at instant `k`, under the
 * model in `opts`. Personalization does not affect the bounds.
 *
 * # Safety
 * `net` and `opts` must be valid pointers; `lo` and `hi` must be writable.
 */
enum TrStatus tr_bounds(const struct TrNetwork *net,
                        const struct TrOptions *opts,
                        size_t k,
                        size_t node,
                        double *lo,
                        double *hi);

/**
 * Kendall tau-b of two score vectors of length `len`.
 *
 * # Safety
 * `x` and `y` must each point to `len` readable doubles; `out` must be
 * writable.
 */
enum TrStatus tr_kendall_tau(const double *x, const double *y, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEMPORANK_H */
