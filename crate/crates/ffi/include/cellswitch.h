#ifndef CELLSWITCH_H
#define CELLSWITCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_UTF8 = 2,
  CS_STATUS_INVALID_JSON = 3,
  CS_STATUS_INVALID_CONFIG = 4,
  CS_STATUS_INVALID_ARGUMENT = 5,
  CS_STATUS_LENGTH_MISMATCH = 6,
  CS_STATUS_SOLVER_LIMIT = 7,
  CS_STATUS_INTERNAL = 99,
} CsStatus;

typedef enum CsFormulation {
  CS_FORMULATION_EFM = 0,
  CS_FORMULATION_WSM = 1,
  CS_FORMULATION_ECM = 2,
} CsFormulation;

typedef enum CsSolver {
  CS_SOLVER_EXHAUSTIVE = 0,
  CS_SOLVER_GREEDY = 1,
  CS_SOLVER_GENETIC = 2,
} CsSolver;

typedef enum CsLinkKind {
  CS_LINK_KIND_TERRESTRIAL_LOS = 0,
  CS_LINK_KIND_TERRESTRIAL_NLOS = 1,
  CS_LINK_KIND_HAPS = 2,
} CsLinkKind;

typedef enum CsUserClass {
  CS_USER_CLASS_HIGH_LOSS_INDOOR = 0,
  CS_USER_CLASS_LOW_LOSS_INDOOR = 1,
  CS_USER_CLASS_OUTDOOR = 2,
} CsUserClass;

/**
 * A scenario bound to one optimisation problem.
 */
typedef struct CsEvaluator CsEvaluator;

/**
 * A generated or loaded scenario with its link table.
 */
typedef struct CsScenario CsScenario;

/**
 * Evaluation of one switch vector.
 */
typedef struct CsReport {
  double power_w;
  uint64_t unconnected;
  uint64_t dissatisfied;
  double wsm_score;
  double objective;
  bool ecm_feasible;
  bool feasible;
} CsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len`). Returns the full message length in bytes.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t cs_last_error_message(char *buf, size_t len);

/**
 * Generates a scenario from a JSON `ScenarioConfig` (null for defaults).
 *
 * # Safety
 * `config_json` must be null or a NUL-terminated string; `out` must be valid.
 */
enum CsStatus cs_scenario_generate(const char *config_json, uint64_t seed, struct CsScenario **out);

/**
 * Loads a scenario previously exported as JSON.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid.
 */
enum CsStatus cs_scenario_from_json(const char *json, struct CsScenario **out);

/**
 * Sets the building entry loss. Link draws are keyed by the scenario seed,
 * so only the BEL term of each link changes.
 *
 * # Safety
 * `scenario` must be a live handle.
 */
enum CsStatus cs_scenario_set_bel(struct CsScenario *scenario, double bel_db);

/**
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t cs_scenario_gamma(const struct CsScenario *scenario);

/**
 * # Safety
 * `scenario` must be null or a live handle.
 */
size_t cs_scenario_user_count(const struct CsScenario *scenario);

/**
 * # Safety
 * `scenario` must be null or a handle not yet freed.
 */
void cs_scenario_free(struct CsScenario *scenario);

/**
 * Binds a copy of `scenario` to a formulation. Weights are read only for WSM.
 *
 * # Safety
 * `scenario` must be a live handle; `out` must be valid.
 */
enum CsStatus cs_evaluator_new(const struct CsScenario *scenario,
                               enum CsFormulation formulation,
                               double alpha,
                               double beta,
                               double upsilon,
                               struct CsEvaluator **out);

/**
 * # Safety
 * `evaluator` must be null or a handle not yet freed.
 */
void cs_evaluator_free(struct CsEvaluator *evaluator);

/**
 * Evaluates the switch vector `delta` (one byte per SBS, nonzero = on).
 *
 * # Safety
 * `evaluator` must be a live handle, `delta` must point to `len` bytes and
 * `out` must be valid.
 */
enum CsStatus cs_evaluate(const struct CsEvaluator *evaluator,
                          const uint8_t *delta,
                          size_t len,
                          struct CsReport *out);

/**
 * Runs a solver and writes the best switch vector into `delta_out`
 * (`len` must equal Γ) and its evaluation into `out`. `ga_seed` is used
 * only by the genetic solver.
 *
 * # Safety
 * `evaluator` must be a live handle, `delta_out` must point to `len`
 * writable bytes and `out` must be valid.
 */
enum CsStatus cs_solve(const struct CsEvaluator *evaluator,
                       enum CsSolver solver,
                       uint64_t ga_seed,
                       uint8_t *delta_out,
                       size_t len,
                       struct CsReport *out);

/**
 * Total path loss in dB under the default radio parameters with the given
 * BEL, a standardised shadowing draw `shadow_z` and fading off. `shadow_z`
 * is ignored for HAPS links.
 *
 * # Safety
 * `out` must be valid.
 */
enum CsStatus cs_path_loss_db(enum CsLinkKind kind,
                              double d3d_m,
                              double f_ghz,
                              double bel_db,
                              enum CsUserClass class_,
                              double shadow_z,
                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CELLSWITCH_H */
