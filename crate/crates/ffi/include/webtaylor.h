#ifndef WEBTAYLOR_H
#define WEBTAYLOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes. Zero is success.
typedef enum WtStatus {
  WT_STATUS_OK = 0,
  WT_STATUS_NULL_POINTER = 1,
  WT_STATUS_INVALID_UTF8 = 2,
  WT_STATUS_PARSE = 3,
  WT_STATUS_UNKNOWN_SUITE = 4,
  WT_STATUS_UNKNOWN_MODEL = 5,
  WT_STATUS_INVALID_ARGUMENT = 6,
  WT_STATUS_INTERNAL = 7,
} WtStatus;

// The outcome of running a scenario.
typedef struct WtReport WtReport;

// A scenario under construction.
typedef struct WtScenario WtScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or NULL. Owned by the library; valid
// until the next failing call.
const char *wt_last_error(void);

// Library version as a static string.
const char *wt_version(void);

// Default scenario: every model, every suite, seed 0.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum WtStatus wt_scenario_new(struct WtScenario **out);

// Parse a scenario from TOML text.
//
// # Safety
// `toml` must be a NUL-terminated string; `out` must be writable.
enum WtStatus wt_scenario_parse(const char *toml, struct WtScenario **out);

// Set the model tag (`rel`, `pcoh`, ..., comma list, or `all`).
//
// # Safety
// `sc` must come from this library; `model` must be NUL-terminated.
enum WtStatus wt_scenario_set_model(struct WtScenario *sc, const char *model);

// Replace the suite list with a comma-separated list of ids or groups.
//
// # Safety
// `sc` must come from this library; `suites` must be NUL-terminated.
enum WtStatus wt_scenario_set_suites(struct WtScenario *sc, const char *suites);

// Set seed, sample count and truncation bounds in one call.
//
// # Safety
// `sc` must come from this library.
enum WtStatus wt_scenario_set_params(struct WtScenario *sc,
                                     uint64_t seed,
                                     size_t samples,
                                     size_t bang_degree,
                                     size_t s_bound);

// Corrupt a structural matrix: `dig`, `seely2`, `coalgebra`, or NULL to clear.
//
// # Safety
// `sc` must come from this library; `mutation` is NULL or NUL-terminated.
enum WtStatus wt_scenario_set_mutation(struct WtScenario *sc, const char *mutation);

// # Safety
// `sc` is NULL or a handle from this library not yet freed.
void wt_scenario_free(struct WtScenario *sc);

// Run every selected suite. A report is produced even when laws fail; check
// [`wt_report_passed`].
//
// # Safety
// `sc` must come from this library; `out` must be writable.
enum WtStatus wt_run(const struct WtScenario *sc, struct WtReport **out);

// 1 when every case passed, 0 otherwise, -1 for a NULL handle.
//
// # Safety
// `r` is NULL or a live report handle.
int32_t wt_report_passed(const struct WtReport *r);

// Number of failing cases across all suites.
//
// # Safety
// `r` is NULL or a live report handle.
size_t wt_report_failures(const struct WtReport *r);

// Structured report as JSON. Free with [`wt_string_free`].
//
// # Safety
// `r` is NULL or a live report handle.
char *wt_report_json(const struct WtReport *r);

// Human-readable summary. Free with [`wt_string_free`].
//
// # Safety
// `r` is NULL or a live report handle.
char *wt_report_text(const struct WtReport *r);

// # Safety
// `r` is NULL or a handle from this library not yet freed.
void wt_report_free(struct WtReport *r);

// # Safety
// `s` is NULL or a string returned by this library not yet freed.
void wt_string_free(char *s);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* WEBTAYLOR_H */
