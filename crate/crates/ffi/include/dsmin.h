#ifndef DSMIN_H
#define DSMIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum DsminAlgorithm {
  DSMIN_ALGORITHM_SUB_SUP = 0,
  DSMIN_ALGORITHM_SUP_SUB = 1,
  DSMIN_ALGORITHM_MOD_MOD = 2,
} DsminAlgorithm;

typedef enum DsminHeuristic {
  DSMIN_HEURISTIC_G_GAIN = 0,
  DSMIN_HEURISTIC_V_GAIN = 1,
  DSMIN_HEURISTIC_RANDOM = 2,
} DsminHeuristic;

/**
 * Result codes.
 */
typedef enum DsminStatus {
  DSMIN_STATUS_OK = 0,
  DSMIN_STATUS_NULL_POINTER = 1,
  DSMIN_STATUS_INVALID_ARGUMENT = 2,
  DSMIN_STATUS_PARSE_ERROR = 3,
  DSMIN_STATUS_INFEASIBLE = 4,
  DSMIN_STATUS_TOO_LARGE = 5,
  DSMIN_STATUS_SOLVER_ERROR = 6,
  DSMIN_STATUS_BUFFER_TOO_SMALL = 7,
  DSMIN_STATUS_PANIC = 8,
} DsminStatus;

/**
 * A pair of submodular functions.
 */
typedef struct DsminInstance DsminInstance;

/**
 * Outcome of one solver run.
 */
typedef struct DsminResult DsminResult;

/**
 * Solver settings; start from [`dsmin_options_default`].
 */
typedef struct DsminOptions {
  enum DsminAlgorithm algorithm;
  double epsilon;
  size_t max_iters;
  enum DsminHeuristic heuristic;
  uint64_t seed;
} DsminOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until the
 * next call into this library on the same thread.
 */
const char *dsmin_last_error(void);

struct DsminOptions dsmin_options_default(void);

/**
 * Builds an instance from JSON `{"f": <spec>, "g": <spec>}`.
 *
 * # Safety
 * `json` must be a nul-terminated string and `out` a valid pointer.
 */
enum DsminStatus dsmin_instance_from_json(const char *json, struct DsminInstance **out);

/**
 * # Safety
 * `inst` must be NULL or a handle from [`dsmin_instance_from_json`] not yet freed.
 */
void dsmin_instance_free(struct DsminInstance *inst);

/**
 * Ground-set size, or 0 for NULL.
 *
 * # Safety
 * `inst` must be NULL or a live handle.
 */
size_t dsmin_instance_size(const struct DsminInstance *inst);

/**
 * `v(X) = f(X) - g(X)` for the 0-based elements `elements[0..len]`.
 *
 * # Safety
 * `inst` must be a live handle, `elements` must point to `len` values and
 * `value` must be valid for writes.
 */
enum DsminStatus dsmin_instance_value(const struct DsminInstance *inst,
                                      const size_t *elements,
                                      size_t len,
                                      double *value);

/**
 * Runs a solver. `options` may be NULL for the defaults; `constraint_json`
 * may be NULL for no constraint, otherwise it is a 1-based constraint spec
 * such as `{"kind": "cardinality_le", "k": 2}`.
 *
 * # Safety
 * Pointers must be NULL where allowed or valid; `out` must be valid for writes.
 */
enum DsminStatus dsmin_solve(const struct DsminInstance *inst,
                             const struct DsminOptions *options,
                             const char *constraint_json,
                             struct DsminResult **out);

/**
 * # Safety
 * `res` must be NULL or a handle from [`dsmin_solve`] not yet freed.
 */
void dsmin_result_free(struct DsminResult *res);

/**
 * Final objective value, or NaN for NULL.
 *
 * # Safety
 * `res` must be NULL or a live handle.
 */
double dsmin_result_value(const struct DsminResult *res);

/**
 * Number of elements in the final set.
 *
 * # Safety
 * `res` must be NULL or a live handle.
 */
size_t dsmin_result_size(const struct DsminResult *res);

/**
 * Copies the final set's 0-based elements, in increasing order, into `buf`.
 *
 * # Safety
 * `res` must be a live handle and `buf` must have room for `cap` values.
 */
enum DsminStatus dsmin_result_elements(const struct DsminResult *res, size_t *buf, size_t cap);

/**
 * Accepted steps after the starting point.
 *
 * # Safety
 * `res` must be NULL or a live handle.
 */
size_t dsmin_result_iterations(const struct DsminResult *res);

/**
 * # Safety
 * `res` must be NULL or a live handle.
 */
uint64_t dsmin_result_oracle_calls(const struct DsminResult *res);

/**
 * # Safety
 * `res` must be NULL or a live handle.
 */
bool dsmin_result_locally_optimal(const struct DsminResult *res);

/**
 * The full trace as JSON (1-based sets). Free with [`dsmin_string_free`].
 *
 * # Safety
 * `res` must be NULL or a live handle.
 */
char *dsmin_result_trace_json(const struct DsminResult *res);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void dsmin_string_free(char *s);

/**
 * The two certified lower bounds on the minimum of `v`.
 *
 * # Safety
 * `inst` must be a live handle; `bound1` and `bound2` must be valid for writes.
 */
enum DsminStatus dsmin_certify(const struct DsminInstance *inst, double *bound1, double *bound2);

/**
 * Exact minimum by enumeration (small ground sets only). The minimizer's
 * 0-based elements go to `buf` and their count to `len`.
 *
 * # Safety
 * `inst` must be a live handle; `value` and `len` must be valid for writes
 * and `buf` must have room for `cap` values.
 */
enum DsminStatus dsmin_brute_force_minimum(const struct DsminInstance *inst,
                                           double *value,
                                           size_t *buf,
                                           size_t cap,
                                           size_t *len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DSMIN_H */
