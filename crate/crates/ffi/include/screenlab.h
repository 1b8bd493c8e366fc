#ifndef SCREENLAB_H
#define SCREENLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ScreenlabStatus {
  SCREENLAB_STATUS_OK = 0,
  SCREENLAB_STATUS_NULL_POINTER = 1,
  SCREENLAB_STATUS_INVALID_ARGUMENT = 2,
  SCREENLAB_STATUS_CONFIG_ERROR = 3,
  SCREENLAB_STATUS_INFEASIBLE = 4,
  SCREENLAB_STATUS_RUNTIME_ERROR = 5,
  SCREENLAB_STATUS_PANIC = 6,
} ScreenlabStatus;

typedef enum ScreenlabProblem {
  /**
   * Score everyone, keep the best quota-respecting set.
   */
  SCREENLAB_PROBLEM_BEST = 0,
  /**
   * Stop at the first k good-enough candidates.
   */
  SCREENLAB_PROBLEM_GOOD = 1,
} ScreenlabProblem;

typedef enum ScreenlabFatigue {
  SCREENLAB_FATIGUE_NONE = 0,
  SCREENLAB_FATIGUE_EPS1 = 1,
  SCREENLAB_FATIGUE_EPS2 = 2,
} ScreenlabFatigue;

/**
 * Experiment configuration.
 */
typedef struct ScreenlabConfig ScreenlabConfig;

/**
 * Aggregates of a finished sweep.
 */
typedef struct ScreenlabResult ScreenlabResult;

/**
 * One sweep point. Missing values are NaN.
 */
typedef struct ScreenlabRow {
  double sweep_value;
  uint64_t runs_total;
  uint64_t runs_feasible;
  double mean_rtb;
  double sd_rtb;
  double mean_jds;
  double sd_jds;
  double mean_frac_protected;
  double mean_evaluated_count;
} ScreenlabRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next call into this library on the same thread.
 */
const char *screenlab_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *screenlab_version(void);

/**
 * Default configuration.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum ScreenlabStatus screenlab_config_default(struct ScreenlabConfig **out);

/**
 * Parses a flat JSON config (the CLI config file format) over the defaults.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum ScreenlabStatus screenlab_config_from_json(const char *json, struct ScreenlabConfig **out);

/**
 * Normalized JSON of `config`; free with [`screenlab_string_free`].
 *
 * # Safety
 * `config` must come from this library; `out` must be a valid pointer.
 */
enum ScreenlabStatus screenlab_config_to_json(const struct ScreenlabConfig *config, char **out);

/**
 * # Safety
 * `config` must come from this library or be NULL.
 */
void screenlab_config_free(struct ScreenlabConfig *config);

/**
 * Runs every sweep point on `threads` workers (0 = all cores). The result
 * does not depend on `threads`.
 *
 * # Safety
 * `config` must come from this library; `out` must be a valid pointer.
 */
enum ScreenlabStatus screenlab_run_sweep(const struct ScreenlabConfig *config,
                                         size_t threads,
                                         struct ScreenlabResult **out);

/**
 * # Safety
 * `result` must come from this library; `out` must be a valid pointer.
 */
enum ScreenlabStatus screenlab_result_row_count(const struct ScreenlabResult *result, size_t *out);

/**
 * # Safety
 * `result` must come from this library; `out` must be a valid pointer.
 */
enum ScreenlabStatus screenlab_result_row(const struct ScreenlabResult *result,
                                          size_t index,
                                          struct ScreenlabRow *out);

/**
 * CSV text identical to the CLI output; free with [`screenlab_string_free`].
 *
 * # Safety
 * `result` must come from this library; `out` must be a valid pointer.
 */
enum ScreenlabStatus screenlab_result_to_csv(const struct ScreenlabResult *result, char **out);

/**
 * # Safety
 * `result` must come from this library or be NULL.
 */
void screenlab_result_free(struct ScreenlabResult *result);

/**
 * # Safety
 * `s` must be a string returned by this library or NULL.
 */
void screenlab_string_free(char *s);

/**
 * Solves one instance. `is_protected` holds 0/1 flags and `order` lists
 * candidate indices by screening position. Writes the selected indices in
 * ascending order to `out_ids` (capacity `k`) and the number of scored
 * candidates to `out_evaluated`. Fatigue draws come from `seed`. Returns
 * `SCREENLAB_STATUS_INFEASIBLE` when k slots cannot be filled; the outputs
 * then hold the partial selection.
 *
 * # Safety
 * Input arrays must hold `n` elements, `out_ids` must hold `k`, and the
 * remaining pointers must be valid.
 */
enum ScreenlabStatus screenlab_select(const double *scores,
                                      const uint8_t *is_protected,
                                      const uint32_t *order,
                                      size_t n,
                                      size_t k,
                                      double q,
                                      double psi,
                                      enum ScreenlabProblem problem,
                                      enum ScreenlabFatigue fatigue,
                                      uint64_t seed,
                                      uint32_t *out_ids,
                                      size_t *out_len,
                                      size_t *out_evaluated);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCREENLAB_H */
