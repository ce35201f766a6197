#ifndef ENGEL_VFG_H
#define ENGEL_VFG_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum EvfgStatus {
  EVFG_STATUS_OK = 0,
  EVFG_STATUS_NULL_POINTER = 1,
  EVFG_STATUS_INVALID_ARGUMENT = 2,
  EVFG_STATUS_BUDGET_EXCEEDED = 3,
  EVFG_STATUS_IO = 4,
  /**
   * A panic or an internal fault; the handle arguments are still valid.
   */
  EVFG_STATUS_INTERNAL = 5,
} EvfgStatus;

/**
 * A group algebra `FG`.
 */
typedef struct EvfgAlgebra EvfgAlgebra;

/**
 * An enumerated normalized unit group `V(FG)`.
 */
typedef struct EvfgUnitGroup EvfgUnitGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message of this thread, or null. Valid until the next call
 * into this library on the same thread.
 */
const char *evfg_last_error(void);

/**
 * Static version string.
 */
const char *evfg_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed once.
 */
void evfg_string_free(char *s);

/**
 * Builds `FG` from a group spec such as `"D4xC3"` and a field order such
 * as `"4"`.
 *
 * # Safety
 * `group` and `field` must be NUL-terminated strings; `out` must be
 * writable.
 */
enum EvfgStatus evfg_algebra_new(const char *group, const char *field, struct EvfgAlgebra **out);

/**
 * # Safety
 * `alg` must be null or a handle from [`evfg_algebra_new`], freed once.
 */
void evfg_algebra_free(struct EvfgAlgebra *alg);

/**
 * `|G|`, the dimension of `FG`.
 *
 * # Safety
 * `alg` must be a live handle; `out` must be writable.
 */
enum EvfgStatus evfg_algebra_dimension(const struct EvfgAlgebra *alg, size_t *out);

/**
 * Whether `V(FG)` is predicted to be nilpotent from `G` and `F` alone.
 *
 * # Safety
 * `alg` must be a live handle; `out` must be writable.
 */
enum EvfgStatus evfg_algebra_predict(const struct EvfgAlgebra *alg, bool *out);

/**
 * Enumerates `V(FG)`, visiting at most `max_points` coefficient vectors.
 *
 * # Safety
 * `alg` must be a live handle; `out` must be writable.
 */
enum EvfgStatus evfg_units_enumerate(const struct EvfgAlgebra *alg,
                                     uint64_t max_points,
                                     struct EvfgUnitGroup **out);

/**
 * # Safety
 * `units` must be null or a handle from [`evfg_units_enumerate`], freed once.
 */
void evfg_units_free(struct EvfgUnitGroup *units);

/**
 * # Safety
 * `units` must be a live handle; `out` must be writable.
 */
enum EvfgStatus evfg_units_order(const struct EvfgUnitGroup *units, uint64_t *out);

/**
 * Exhaustive Engel test; `BudgetExceeded` when `|V|` is above 4096.
 *
 * # Safety
 * `units` must be a live handle; `out` must be writable.
 */
enum EvfgStatus evfg_units_is_engel(const struct EvfgUnitGroup *units, bool *out);

/**
 * Nilpotency class of `V`; `*is_nilpotent` is false when the lower central
 * series stalls, and `*class` is then left untouched.
 *
 * # Safety
 * `units` must be a live handle; `is_nilpotent` and `class` must be writable.
 */
enum EvfgStatus evfg_units_nilpotency_class(const struct EvfgUnitGroup *units,
                                            bool *is_nilpotent,
                                            size_t *class_);

/**
 * Full case report for one `(G, F)` as JSON.
 *
 * # Safety
 * `group` and `field` must be NUL-terminated strings; `out` must be
 * writable.
 */
enum EvfgStatus evfg_analyze_json(const char *group,
                                  const char *field,
                                  uint64_t samples,
                                  uint64_t seed,
                                  char **out);

/**
 * Runs the corpus and returns the report document. `config_json` may be
 * null for the defaults, or a partial JSON object with the suite config
 * keys. `failures` (nullable) receives the number of failing checks.
 *
 * # Safety
 * `config_json` must be null or a NUL-terminated string; `out` must be
 * writable; `failures` must be null or writable.
 */
enum EvfgStatus evfg_run_suite_json(const char *config_json, char **out, size_t *failures);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENGEL_VFG_H */
