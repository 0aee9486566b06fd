#ifndef PMBOX_H
#define PMBOX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PmboxNoise {
  PMBOX_NOISE_DEPOLARIZING = 0,
  PMBOX_NOISE_DEPHASING = 1,
} PmboxNoise;

typedef enum PmboxStatus {
  PMBOX_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  PMBOX_STATUS_NULL_ARGUMENT = 1,
  /**
   * Malformed or inconsistent input (names, JSON, shapes, values).
   */
  PMBOX_STATUS_INVALID_INPUT = 2,
  /**
   * The request exceeds a size guard.
   */
  PMBOX_STATUS_GUARD_EXCEEDED = 3,
  /**
   * The protocol does not violate the inequality.
   */
  PMBOX_STATUS_NO_VIOLATION = 4,
  PMBOX_STATUS_IO = 5,
  /**
   * A Rust panic was caught at the boundary.
   */
  PMBOX_STATUS_INTERNAL = 6,
} PmboxStatus;

typedef struct PmboxInequality PmboxInequality;

typedef struct PmboxProtocol PmboxProtocol;

/**
 * See-saw settings; start from [`pmbox_seesaw_default_options`].
 */
typedef struct PmboxSeesawOptions {
  size_t dim_a;
  size_t dim_b;
  size_t restarts;
  size_t max_sweeps;
  double tol;
  uint64_t seed;
  /**
   * Nonzero for qubit messages.
   */
  int32_t quantum_message;
  /**
   * 0 uses `PMBOX_THREADS` or all cores.
   */
  size_t threads;
} PmboxSeesawOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty if none. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *pmbox_last_error_message(void);

/**
 * Library version, static storage.
 */
const char *pmbox_version(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, freed at most once.
 */
void pmbox_string_free(char *s);

/**
 * # Safety
 * `name` must be a NUL-terminated string and `out` writable.
 */
enum PmboxStatus pmbox_inequality_builtin(const char *name, struct PmboxInequality **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum PmboxStatus pmbox_inequality_from_json(const char *json, struct PmboxInequality **out);

/**
 * # Safety
 * `ineq` must be a live handle; `out` receives a string for [`pmbox_string_free`].
 */
enum PmboxStatus pmbox_inequality_to_json(const struct PmboxInequality *ineq, char **out);

/**
 * # Safety
 * `ineq` must be null or a handle from this library, freed at most once.
 */
void pmbox_inequality_free(struct PmboxInequality *ineq);

/**
 * Exact classical bound as a reduced fraction.
 *
 * # Safety
 * `ineq` must be a live handle and the outputs writable.
 */
enum PmboxStatus pmbox_classical_bound(const struct PmboxInequality *ineq,
                                       int64_t *numerator,
                                       int64_t *denominator);

/**
 * Facet certificate. `is_facet` is set to 0 or 1.
 *
 * # Safety
 * `ineq` must be a live handle and the outputs writable.
 */
enum PmboxStatus pmbox_verify_facet(const struct PmboxInequality *ineq,
                                    int32_t *is_facet,
                                    size_t *saturating_count);

/**
 * Number of distinct vertices of the classical polytope.
 *
 * # Safety
 * `out` must be writable.
 */
enum PmboxStatus pmbox_vertex_count(size_t d, size_t n_x, size_t n_b, size_t *out);

/**
 * Facet enumeration; writes the class list as JSON.
 *
 * # Safety
 * `out` must be writable; the string is released with [`pmbox_string_free`].
 */
enum PmboxStatus pmbox_enumerate_facets(size_t d, size_t n_x, size_t n_b, char **out);

/**
 * # Safety
 * `name` must be a NUL-terminated string and `out` writable.
 */
enum PmboxStatus pmbox_protocol_builtin(const char *name, struct PmboxProtocol **out);

/**
 * # Safety
 * `json` must be a NUL-terminated string and `out` writable.
 */
enum PmboxStatus pmbox_protocol_from_json(const char *json, struct PmboxProtocol **out);

/**
 * # Safety
 * `p` must be a live handle; `out` receives a string for [`pmbox_string_free`].
 */
enum PmboxStatus pmbox_protocol_to_json(const struct PmboxProtocol *p, char **out);

/**
 * # Safety
 * `p` must be null or a handle from this library, freed at most once.
 */
void pmbox_protocol_free(struct PmboxProtocol *p);

/**
 * Value of the inequality on the protocol's behavior.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum PmboxStatus pmbox_protocol_score(const struct PmboxProtocol *p,
                                      const struct PmboxInequality *ineq,
                                      double *out);

/**
 * Smallest visibility at which the protocol still violates the inequality.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum PmboxStatus pmbox_noise_threshold(const struct PmboxProtocol *p,
                                       const struct PmboxInequality *ineq,
                                       enum PmboxNoise kind,
                                       double *out);

struct PmboxSeesawOptions pmbox_seesaw_default_options(void);

/**
 * See-saw search. `protocol_out` may be null when only the value is wanted.
 *
 * # Safety
 * `ineq` must be a live handle, `opts` readable and `best_value` writable.
 */
enum PmboxStatus pmbox_seesaw(const struct PmboxInequality *ineq,
                              const struct PmboxSeesawOptions *opts,
                              double *best_value,
                              struct PmboxProtocol **protocol_out);

/**
 * One-bit bound of the facet family, `n >= 3`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PmboxStatus pmbox_info_bound(size_t n, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PMBOX_H */
