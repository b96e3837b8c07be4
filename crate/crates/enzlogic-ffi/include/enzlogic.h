/* C bindings for the enzlogic simulation core. */

#ifndef ENZLOGIC_H
#define ENZLOGIC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes shared with the CLI exit-code contract.
typedef enum EzlStatus {
  // Success (for checks: the property holds).
  EZL_STATUS_OK = 0,
  // The operation ran but the logic property failed.
  EZL_STATUS_LOGIC_FAIL = 1,
  // Configuration or argument error.
  EZL_STATUS_CONFIG_ERROR = 2,
  // Numerical failure (integration breakdown, non-settling bound).
  EZL_STATUS_NUMERIC_ERROR = 3,
  // A required pointer argument was null.
  EZL_STATUS_NULL_POINTER = 4,
} EzlStatus;

// Opaque parsed scenario.
typedef struct EzlScenario EzlScenario;

// Opaque sampled trace.
typedef struct EzlTrace EzlTrace;

// Closed-form NOT-gate settle bounds.
typedef struct EzlNotGateBounds {
  double t_plus;
  // NaN when the formula's domain condition fails.
  double t_minus;
  // Nonzero when `kappa <= (1 + K_m) * p` invalidates the fall formula.
  uint8_t t_minus_domain_violated;
  // Measured fall settle time when the formula domain fails, else NaN.
  double t_minus_empirical;
  double t_max;
} EzlNotGateBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message from the most recent failing call on this thread. Borrowed;
// valid until the next failing call on the same thread.
const char *ezl_last_error(void);

// Crate version as a static string.
const char *ezl_version(void);

// Release a string returned by a `*mut c_char` API.
//
// # Safety
// `s` must have been returned by this library and not freed before.
void ezl_string_free(char *s);

// Parse a scenario from configuration text. Returns null on error (see
// [`ezl_last_error`]).
//
// # Safety
// `text` must be a valid NUL-terminated string.
struct EzlScenario *ezl_scenario_parse_str(const char *text);

// Parse a scenario file. Returns null on error.
//
// # Safety
// `path` must be a valid NUL-terminated string.
struct EzlScenario *ezl_scenario_parse_file(const char *path);

// # Safety
// `scenario` must come from a parse call and not be freed twice.
void ezl_scenario_free(struct EzlScenario *scenario);

// Simulate a scenario; returns a trace handle or null on error.
//
// # Safety
// `scenario` must be a live handle from a parse call.
struct EzlTrace *ezl_simulate(const struct EzlScenario *scenario);

// # Safety
// `trace` must come from [`ezl_simulate`] and not be freed twice.
void ezl_trace_free(struct EzlTrace *trace);

// Number of time samples in a trace (0 for a null handle).
//
// # Safety
// `trace` must be a live handle or null.
uintptr_t ezl_trace_num_samples(const struct EzlTrace *trace);

// Number of data columns (species, enzymes, output aliases).
//
// # Safety
// `trace` must be a live handle or null.
uintptr_t ezl_trace_num_series(const struct EzlTrace *trace);

// Sample instants; borrowed, `ezl_trace_num_samples` entries.
//
// # Safety
// `trace` must be a live handle or null; the pointer is valid while the
// trace is alive.
const double *ezl_trace_times(const struct EzlTrace *trace);

// Name of column `index`, not NUL-terminated; its byte length is written
// to `out_len`. Returns null if out of range.
//
// # Safety
// `trace` must be a live handle or null; `out_len` may be null. The
// returned pointer is only valid while the trace is alive.
const char *ezl_trace_series_name(const struct EzlTrace *trace,
                                  uintptr_t index,
                                  uintptr_t *out_len);

// Values of column `index`; borrowed, `ezl_trace_num_samples` entries.
//
// # Safety
// `trace` must be a live handle or null.
const double *ezl_trace_series(const struct EzlTrace *trace, uintptr_t index);

// Render the trace as CSV (`t,<species...>,<enzyme...>`). Caller frees the
// string with [`ezl_string_free`].
//
// # Safety
// `trace` must be a live handle or null.
char *ezl_trace_to_csv(const struct EzlTrace *trace);

// Equilibrium truth table against the Boolean reference. `out_report`
// (optional) receives the printed rows; free it with [`ezl_string_free`].
// Returns `Ok` when every row matches, `LogicFail` otherwise.
//
// # Safety
// `scenario` must be a live handle; `out_report` may be null.
enum EzlStatus ezl_truth_table(const struct EzlScenario *scenario, char **out_report);

// Simulate and check the delayed-recovery property. `out_report` receives
// the PASS/FAIL report. Returns `Ok` on pass, `LogicFail` on fail.
//
// # Safety
// `scenario` must be a live handle; `out_report` may be null.
enum EzlStatus ezl_check_seqmap(const struct EzlScenario *scenario, char **out_report);

// Michaelis-Menten rate `k_cat * e * s / (K_m + s)`.
//
// # Safety
// `out_rate` must be a valid pointer.
enum EzlStatus ezl_michaelis_rate(double k_cat,
                                  double e_conc,
                                  double k_m,
                                  double s_conc,
                                  double *out_rate);

// Threshold a concentration: 0, 1, or 2 for the invalid band; -1 on a
// domain error.
int32_t ezl_threshold(double x, double tau0, double tau1);

// Closed-form NOT-gate settle bounds for an input enzyme (`kcat_e`,
// `km_e`), a bias enzyme with effective rate `p_rate` and Michaelis
// constant `km_p`, and error bound `kappa`.
//
// # Safety
// `out` must be a valid pointer.
enum EzlStatus ezl_not_gate_bounds(double kcat_e,
                                   double km_e,
                                   double p_rate,
                                   double km_p,
                                   double kappa,
                                   struct EzlNotGateBounds *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENZLOGIC_H */
