#ifndef SHELLCORE_H
#define SHELLCORE_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Outcome of a call.
 */
typedef enum ScStatus {
  SC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  SC_STATUS_NULL = 1,
  /**
   * A string argument was not UTF-8.
   */
  SC_STATUS_UTF8 = 2,
  /**
   * A system, formula or lattice file did not parse, or a name is unknown.
   */
  SC_STATUS_PARSE = 3,
  /**
   * The trace universe cannot hold the system's paths.
   */
  SC_STATUS_UNIVERSE = 4,
  /**
   * An enumeration would exceed its cap.
   */
  SC_STATUS_CAP = 5,
  /**
   * Anything else, including a caught panic.
   */
  SC_STATUS_INTERNAL = 6,
} ScStatus;

/**
 * Which extremal closure to compute.
 */
typedef enum ScMode {
  SC_MODE_SHELL = 0,
  SC_MODE_CORE = 1,
} ScMode;

/**
 * A parsed lattice file with its domains and functions.
 */
typedef struct ScLattice ScLattice;

/**
 * A transition system, made total on parse.
 */
typedef struct ScSystem ScSystem;

/**
 * Result of comparing trace and state semantics of a formula.
 */
typedef struct ScCheck {
  /**
   * Universal abstraction of the trace semantics, bit `i` for state `i`.
   */
  uint64_t alpha_mask;
  /**
   * State semantics, same encoding.
   */
  uint64_t state_mask;
  bool branchable;
  /**
   * Membership in the deterministic fragment.
   */
  bool deterministic;
} ScCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *sc_last_error(void);

/**
 * # Safety
 * `text` must come from this library and not be freed twice.
 */
void sc_string_free(char *text);

/**
 * Parses a system in the text format and totalizes it.
 *
 * # Safety
 * `text` is a NUL-terminated string; `out` is valid for writes.
 */
enum ScStatus sc_system_parse(const char *text, struct ScSystem **out);

/**
 * # Safety
 * `system` is null or a handle from [`sc_system_parse`] not yet freed.
 */
void sc_system_free(struct ScSystem *system);

/**
 * Number of states, and of self-loops added to make the system total.
 *
 * # Safety
 * `system` is a live handle; the outputs are valid for writes.
 */
enum ScStatus sc_system_size(struct ScSystem *system, size_t *states, size_t *added_loops);

/**
 * Whether no state has two predecessors, and whether every edge is matched by its reverse.
 *
 * # Safety
 * `system` is a live handle; the outputs are valid for writes.
 */
enum ScStatus sc_system_properties(struct ScSystem *system, bool *injective, bool *symmetric);

/**
 * Number of state sets kept by the next-time core, enumerating subsets of
 * at most `cap` states.
 *
 * # Safety
 * `system` is a live handle; `count` is valid for writes.
 */
enum ScStatus sc_system_core_next_count(struct ScSystem *system, size_t cap, size_t *count);

/**
 * Compares trace and state semantics of `formula` on the system's default
 * trace universe (built on first use and kept with the handle).
 *
 * # Safety
 * `system` is a live handle; `formula` is a NUL-terminated string; `out` is valid for writes.
 */
enum ScStatus sc_system_check(struct ScSystem *system, const char *formula, struct ScCheck *out);

/**
 * Parses a lattice file.
 *
 * # Safety
 * `text` is a NUL-terminated string; `out` is valid for writes.
 */
enum ScStatus sc_lattice_parse(const char *text, struct ScLattice **out);

/**
 * # Safety
 * `lattice` is null or a handle from [`sc_lattice_parse`] not yet freed.
 */
void sc_lattice_free(struct ScLattice *lattice);

/**
 * Complete shell or core of `domain` for the comma-separated `functions`.
 * `*result` receives the name of the resulting domain when the file
 * declares it, otherwise its fixpoints; free it with [`sc_string_free`].
 *
 * # Safety
 * `lattice` is a live handle; the strings are NUL-terminated; `result` is valid for writes.
 */
enum ScStatus sc_lattice_shellcore(struct ScLattice *lattice,
                                   const char *domain,
                                   const char *functions,
                                   enum ScMode mode,
                                   char **result);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SHELLCORE_H */
