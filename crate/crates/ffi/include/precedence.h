#ifndef PRECEDENCE_H
#define PRECEDENCE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum PrecedenceStatus {
  PRECEDENCE_STATUS_OK = 0,
  /*
   A required pointer was null or a string was not UTF-8.
   */
  PRECEDENCE_STATUS_NULL_OR_INVALID_ARGUMENT = 1,
  /*
   Malformed JSON or a malformed value inside it.
   */
  PRECEDENCE_STATUS_PARSE = 2,
  /*
   A value outside the domain of the operation.
   */
  PRECEDENCE_STATUS_DOMAIN = 3,
  /*
   A load-sharing model that cannot generate a failure order.
   */
  PRECEDENCE_STATUS_INVALID_MODEL = 4,
  /*
   A pattern with ties, or a schedule that yields non-positive rates.
   */
  PRECEDENCE_STATUS_UNREALIZABLE = 5,
  /*
   A caught panic; indicates a bug.
   */
  PRECEDENCE_STATUS_INTERNAL = 6,
} PrecedenceStatus;

/*
 A probability distribution on the permutations of `[m]`.
 */
typedef struct PrecedenceDistribution PrecedenceDistribution;

/*
 A load-sharing model (order-dependent or set-invariant).
 */
typedef struct PrecedenceModel PrecedenceModel;

/*
 A ranking pattern.
 */
typedef struct PrecedencePattern PrecedencePattern;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failed call on this thread, or an empty string.
 The pointer stays valid until the next call on this thread.
 */
const char *precedence_last_error(void);

/*
 Releases a string returned by this library. Null is ignored.

 # Safety
 `s` must come from this library and not have been freed.
 */
void precedence_string_free(char *s);

/*
 Parses `{"m":3,"weights":[{"perm":[1,2,3],"p":"1/6"},...]}`.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum PrecedenceStatus precedence_distribution_from_json(const char *json,
                                                        struct PrecedenceDistribution **out);

/*
 # Safety
 `dist` must be null or a live handle from this library.
 */
void precedence_distribution_free(struct PrecedenceDistribution *dist);

/*
 Serializes a distribution to JSON.

 # Safety
 `dist` must be a live handle; `out` must be writable.
 */
enum PrecedenceStatus precedence_distribution_to_json(const struct PrecedenceDistribution *dist,
                                                      char **out);

/*
 `alpha_j(A)` as an exact rational string such as `"5/9"`. `set` lists
 the `len` members of `A`.

 # Safety
 `dist` must be a live handle, `set` must point to `len` bytes and `out`
 must be writable.
 */
enum PrecedenceStatus precedence_alpha(const struct PrecedenceDistribution *dist,
                                       const uint8_t *set,
                                       size_t len,
                                       uint8_t j,
                                       char **out);

/*
 The whole family of winning probabilities as JSON.

 # Safety
 `dist` must be a live handle; `out` must be writable.
 */
enum PrecedenceStatus precedence_alpha_family_json(const struct PrecedenceDistribution *dist,
                                                   char **out);

/*
 The order-dependent load-sharing model generating `dist`.

 # Safety
 `dist` must be a live handle; `out` must be writable.
 */
enum PrecedenceStatus precedence_invert_to_ls(const struct PrecedenceDistribution *dist,
                                              struct PrecedenceModel **out);

/*
 Parses either model layout (entries keyed by `prefix` or `survivors`).

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum PrecedenceStatus precedence_model_from_json(const char *json, struct PrecedenceModel **out);

/*
 # Safety
 `model` must be a live handle; `out` must be writable.
 */
enum PrecedenceStatus precedence_model_to_json(const struct PrecedenceModel *model, char **out);

/*
 # Safety
 `model` must be null or a live handle from this library.
 */
void precedence_model_free(struct PrecedenceModel *model);

/*
 The failure-order distribution generated by a model.

 # Safety
 `model` must be a live handle; `out` must be writable.
 */
enum PrecedenceStatus precedence_model_distribution(const struct PrecedenceModel *model,
                                                    struct PrecedenceDistribution **out);

/*
 Parses `{"m":3,"functions":[{"set":[1,2],"ranks":{"1":1,"2":2}},...]}`.

 # Safety
 `json` must be a NUL-terminated string; `out` must be writable.
 */
enum PrecedenceStatus precedence_pattern_from_json(const char *json,
                                                   struct PrecedencePattern **out);

/*
 # Safety
 `pattern` must be null or a live handle from this library.
 */
void precedence_pattern_free(struct PrecedencePattern *pattern);

/*
 Certifies p-concordance of LS(eps, sigma) with `pattern` under the
 universal schedule. Writes the certificate JSON to `out` and 1 or 0 to
 `passed`.

 # Safety
 `pattern` must be a live handle; `out` and `passed` must be writable.
 */
enum PrecedenceStatus precedence_certify(const struct PrecedencePattern *pattern,
                                         char **out,
                                         int32_t *passed);

/*
 An integer voting situation realizing `pattern`, as JSON.

 # Safety
 `pattern` must be a live handle; `out` must be writable.
 */
enum PrecedenceStatus precedence_synthesize_votes(const struct PrecedencePattern *pattern,
                                                  char **out);

/*
 Probability signature of the system given by `system_json`
 (`{"r":3,"path_sets":[[1,2],[1,3]]}`) under `dist`, as JSON.

 # Safety
 `system_json` must be a NUL-terminated string, `dist` a live handle and
 `out` writable.
 */
enum PrecedenceStatus precedence_signature(const char *system_json,
                                           const struct PrecedenceDistribution *dist,
                                           char **out);

/*
 Simulates `samples` trajectories of `model` and writes the summary
 JSON. `workers == 0` uses one thread per core.

 # Safety
 `model` must be a live handle; `out` must be writable.
 */
enum PrecedenceStatus precedence_simulate(const struct PrecedenceModel *model,
                                          uint64_t samples,
                                          uint64_t seed,
                                          size_t workers,
                                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PRECEDENCE_H */
