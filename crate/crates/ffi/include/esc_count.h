#ifndef ESC_COUNT_H
#define ESC_COUNT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Counting method for [`esc_count`].
typedef enum EscMethod {
  // Best applicable closed form.
  ESC_METHOD_CLOSED = 0,
  ESC_METHOD_CONGRUENCE = 1,
  ESC_METHOD_NAIVE = 2,
  ESC_METHOD_ORBITS = 3,
} EscMethod;

// Result of every fallible call.
typedef enum EscStatus {
  ESC_STATUS_OK = 0,
  ESC_STATUS_NULL_POINTER = 1,
  ESC_STATUS_INVALID_UTF8 = 2,
  ESC_STATUS_PARSE = 3,
  ESC_STATUS_BUDGET_EXCEEDED = 4,
  ESC_STATUS_INVALID_ARGUMENT = 5,
  ESC_STATUS_DISAGREEMENT = 6,
  ESC_STATUS_INTERNAL = 7,
} EscStatus;

// Opaque finite abelian group.
typedef struct EscGroup EscGroup;

// Parse a group spec such as `"C12"`, `"C4xC2"` or `"C3^2"`.
//
// # Safety
// `spec` must be a NUL-terminated string and `out` a valid pointer.
enum EscStatus esc_group_parse(const char *spec, struct EscGroup **out);

// Release a group. Null is ignored.
//
// # Safety
// `group` must come from [`esc_group_parse`] and not be freed twice.
void esc_group_free(struct EscGroup *group);

// Order `|G|`.
//
// # Safety
// `group` must be a live handle and `out` a valid pointer.
enum EscStatus esc_group_order(const struct EscGroup *group, uint64_t *out);

// Canonical spec of the group, e.g. `"C4xC3"` for `"C12"`. Release the
// string with [`esc_string_free`].
//
// # Safety
// `group` must be a live handle and `out` a valid pointer.
enum EscStatus esc_group_canonical(const struct EscGroup *group, char **out);

// `N(G, n)` as a decimal string. Release it with [`esc_string_free`].
//
// # Safety
// `group` must be a live handle and `out` a valid pointer.
enum EscStatus esc_count(const struct EscGroup *group,
                         uint32_t n,
                         enum EscMethod method,
                         char **out);

// Cross-check every method on all abelian groups of order `<= max_order`
// for `1 <= n <= max_n`, plus the table of known values. Writes the number
// of flagged disagreements to `disagreements` (if non-null) and returns
// `Disagreement` when it is nonzero.
//
// # Safety
// `disagreements` must be null or a valid pointer.
enum EscStatus esc_verify(uint64_t max_order, uint32_t max_n, uint64_t *disagreements);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be freed twice.
void esc_string_free(char *s);

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next call into the library from the same thread.
const char *esc_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *esc_version(void);

#endif  /* ESC_COUNT_H */
