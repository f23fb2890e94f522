#ifndef VARMULT_H
#define VARMULT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum VmStatus {
  VM_STATUS_OK = 0,
  VM_STATUS_NULL_POINTER = 1,
  VM_STATUS_INVALID_UTF8 = 2,
  /**
   * Well-formed JSON with the wrong shape, or an invalid system.
   */
  VM_STATUS_INVALID_INPUT = 3,
  /**
   * Malformed JSON or an expression that does not parse.
   */
  VM_STATUS_PARSE_ERROR = 4,
  /**
   * The system has no first-order multiplier at all.
   */
  VM_STATUS_NOT_NORMAL_FORM = 5,
  VM_STATUS_INTERNAL = 6,
  VM_STATUS_PANIC = 7,
} VmStatus;

/**
 * Opaque handle to a multiplier analysis.
 */
typedef struct VmReport VmReport;

/**
 * Opaque handle to a parsed system.
 */
typedef struct VmSystem VmSystem;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parse a system document `{"m": .., "dependent": [..], "f": [..]}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum VmStatus vm_system_new_from_json(const char *json, struct VmSystem **out);

/**
 * # Safety
 * `sys` must come from [`vm_system_new_from_json`] or be null.
 */
void vm_system_free(struct VmSystem *sys);

/**
 * Number of dependent variables.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum VmStatus vm_system_m(const struct VmSystem *sys, size_t *out);

/**
 * Run the multiplier analysis. A system outside normal form yields
 * `VM_STATUS_NOT_NORMAL_FORM` and no report.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum VmStatus vm_analyze_multipliers(const struct VmSystem *sys,
                                     uint64_t seed,
                                     uint32_t degree_cap,
                                     struct VmReport **out);

/**
 * # Safety
 * `report` must come from [`vm_analyze_multipliers`] or be null.
 */
void vm_report_free(struct VmReport *report);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum VmStatus vm_report_dimension(const struct VmReport *report, size_t *out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum VmStatus vm_report_rank(const struct VmReport *report, size_t *out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum VmStatus vm_report_stage(const struct VmReport *report, size_t *out);

/**
 * The full report as JSON; free with [`vm_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum VmStatus vm_report_to_json(const struct VmReport *report, char **out);

/**
 * Normal form, H, K, S, connection form and multiplier conditions as JSON.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum VmStatus vm_invariants_json(const struct VmSystem *sys, char **out);

/**
 * Two-component classification verdict as JSON.
 *
 * # Safety
 * `sys` must be a live handle; `out` must be writable.
 */
enum VmStatus vm_classify_json(const struct VmSystem *sys, uint64_t seed, char **out);

/**
 * Off-shell check of `E(L) = M (u_xy - f)`. `lagrangian` is a JSON string
 * or `{"L": ..}` or `{"R", "Q", "P", "N"}`; `multiplier` a JSON matrix.
 *
 * # Safety
 * Pointers must be valid; strings NUL-terminated.
 */
enum VmStatus vm_verify_multiplier(const struct VmSystem *sys,
                                   const char *lagrangian,
                                   const char *multiplier,
                                   bool *holds);

/**
 * Killing form, bi-invariant forms and the associated system for a
 * structure-constant document `{"m": .., "brackets": [..]}`.
 *
 * # Safety
 * `structure` must be NUL-terminated; `out` must be writable.
 */
enum VmStatus vm_lie_json(const char *structure, char **out);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void vm_string_free(char *s);

/**
 * Message for the last failing call on this thread; empty after a
 * success. Valid until the next call into the library.
 */
const char *vm_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VARMULT_H */
