#ifndef TAUMODEL_H
#define TAUMODEL_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes.
typedef enum TmStatus {
  TM_STATUS_OK = 0,
  // The command ran but a check or cross-route agreement failed.
  TM_STATUS_FAILED = 1,
  // Malformed configuration or arguments.
  TM_STATUS_CONFIG = 2,
  // A computation could not be carried out.
  TM_STATUS_COMPUTE = 3,
  // A required pointer was null.
  TM_STATUS_NULL_ARGUMENT = 4,
  // The library panicked; this is a bug.
  TM_STATUS_PANIC = 5,
} TmStatus;

// A chain built from a JSON configuration.
typedef struct TmChain TmChain;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. The pointer
// stays valid until the next call into the library from the same thread.
const char *tm_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and must not be used afterwards.
void tm_string_free(char *s);

// Library version as a static string.
const char *tm_version(void);

// Builds a chain from a JSON configuration (the same schema as the command
// line tool). `mode` may be null, `"exact"` or `"float"`.
//
// # Safety
// `config_json` and `mode` must be null or NUL-terminated; `out` must be
// writable.
enum TmStatus tm_chain_new(const char *config_json, const char *mode, struct TmChain **out);

// Destroys a chain. Null is ignored.
//
// # Safety
// `chain` must come from [`tm_chain_new`] and must not be used afterwards.
void tm_chain_free(struct TmChain *chain);

// Number of components, or 0 for a null handle.
//
// # Safety
// `chain` must be null or a live handle.
size_t tm_chain_p(const struct TmChain *chain);

// Matrix size `N`, or 0 for a null handle.
//
// # Safety
// `chain` must be null or a live handle.
size_t tm_chain_n(const struct TmChain *chain);

// Evaluates the partition function along `route` (`brute`, `desym`, `det`
// or `fock`). Exact values come back as `"num/den"` strings, float values
// in shortest round-trip decimal form.
//
// # Safety
// `chain` must be a live handle, `route` NUL-terminated, `out` writable.
enum TmStatus tm_chain_z(const struct TmChain *chain, const char *route, char **out);

// The chained moment matrix as a JSON array of rows of value strings.
//
// # Safety
// `chain` must be a live handle and `out` writable.
enum TmStatus tm_chain_moment_matrix(const struct TmChain *chain, char **out);

// Runs a command (`compute`, `verify`, `deform`, `toda` or `loop`) and
// writes the JSON report to `out`. `mode` may be null; a negative `seed`
// keeps the configured one. The report is written whenever the command ran,
// including when it returns [`TmStatus::Failed`] or [`TmStatus::Compute`]
// because a check or route failed.
//
// # Safety
// String arguments must be null or NUL-terminated; `out` must be writable.
enum TmStatus tm_run(const char *command,
                     const char *config_json,
                     const char *mode,
                     int64_t seed,
                     char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TAUMODEL_H */
