/* C interface to the orbit-weyl verification engine. */

#ifndef ORBIT_WEYL_H
#define ORBIT_WEYL_H

/* Generated by cbindgen; run `cargo build -p orbit-weyl-ffi` to refresh. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible entry point.
typedef enum OrbitWeylStatus {
  // The call succeeded (for runs: every requested check passed).
  ORBIT_WEYL_STATUS_OK = 0,
  // The run completed but at least one verification check failed;
  // the report is still produced.
  ORBIT_WEYL_STATUS_CHECKS_FAILED = 1,
  // Invalid family/rank/object/configuration.
  ORBIT_WEYL_STATUS_INVALID_ARGUMENT = 2,
  // A required pointer argument was null.
  ORBIT_WEYL_STATUS_NULL_POINTER = 3,
  // Unexpected internal failure (see `orbit_weyl_last_error`).
  ORBIT_WEYL_STATUS_INTERNAL = 4,
} OrbitWeylStatus;

// Opaque verification engine bound to one algebra.
typedef struct OrbitWeylEngine OrbitWeylEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent error on this thread. Borrowed pointer, valid
// until the next failing call on the same thread; do not free.
const char *orbit_weyl_last_error(void);

// Create an engine for family ("sl" or "so") and rank N. On success writes
// the handle to `out` and returns Ok; the handle must be released with
// `orbit_weyl_engine_free`.
//
// # Safety
// `family` must be a valid NUL-terminated string; `out` must be valid.
enum OrbitWeylStatus orbit_weyl_engine_new(const char *family,
                                           uint32_t n,
                                           struct OrbitWeylEngine **out);

// Release an engine handle. Null is tolerated.
//
// # Safety
// `engine` must come from `orbit_weyl_engine_new` and not be freed twice.
void orbit_weyl_engine_free(struct OrbitWeylEngine *engine);

// Run the verification suites. `config_json` may be null or empty for the
// defaults. On Ok or ChecksFailed, `out_report` receives the JSON report
// (free with `orbit_weyl_string_free`).
//
// # Safety
// `engine` and `out_report` must be valid; `config_json` null or valid.
enum OrbitWeylStatus orbit_weyl_run_json(const struct OrbitWeylEngine *engine,
                                         const char *config_json,
                                         char **out_report);

// Canonical text dump of D0, A, B, C, S, f_psi, or gram:<p>.
//
// # Safety
// `engine`, `object`, and `out_text` must be valid pointers.
enum OrbitWeylStatus orbit_weyl_dump(const struct OrbitWeylEngine *engine,
                                     const char *object,
                                     char **out_text);

// Free a string produced by this library. Null is tolerated.
//
// # Safety
// `s` must come from this library and not be freed twice.
void orbit_weyl_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORBIT_WEYL_H */
