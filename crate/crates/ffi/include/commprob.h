/* Generated by cbindgen from crates/ffi. Do not edit. */

#ifndef COMMPROB_H
#define COMMPROB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_POINTER = 1,
  CP_STATUS_INVALID_UTF8 = 2,
  CP_STATUS_INVALID_INPUT = 3,
  CP_STATUS_UNSUPPORTED = 4,
  CP_STATUS_SIZE_CAP = 5,
  CP_STATUS_BUDGET = 6,
  CP_STATUS_INTERNAL = 7,
  CP_STATUS_PANIC = 8,
} CpStatus;

typedef enum CpMethod {
  CP_METHOD_BRANCHING = 0,
  CP_METHOD_LESCOT = 1,
  CP_METHOD_ORACLE = 2,
} CpMethod;

// Opaque group handle.
typedef struct CpGroup CpGroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread. Valid until the next call
// on the same thread; never null.
const char *cp_last_error(void);

// Builds the group named by `descriptor`, e.g. "GL(2,3)" or "Q8".
//
// # Safety
// `descriptor` must be a nul-terminated string and `out` a valid pointer.
enum CpStatus cp_group_new(const char *descriptor, struct CpGroup **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `g` must come from `cp_group_new` and not be used afterwards.
void cp_group_free(struct CpGroup *g);

// Canonical descriptor text of the group.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CpStatus cp_group_descriptor(const struct CpGroup *g, char **out);

// Group order.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CpStatus cp_group_order(const struct CpGroup *g, uint64_t *out);

// Number of conjugacy classes.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer.
enum CpStatus cp_group_class_count(const struct CpGroup *g, uint64_t *out);

// Commuting probability cp_n as "num/den".
//
// # Safety
// `g` must be a live handle and `out` a valid pointer. The string must be
// released with `cp_string_free`.
enum CpStatus cp_group_cp(const struct CpGroup *g, uint32_t n, enum CpMethod method, char **out);

// c_G(n), the number of simultaneous conjugacy classes of commuting n-tuples.
//
// # Safety
// `g` must be a live handle and `out` a valid pointer. The string must be
// released with `cp_string_free`.
enum CpStatus cp_group_ctuples(const struct CpGroup *g, uint32_t n, char **out);

// Number of commuting pairs of d x d matrices over GF(q).
//
// # Safety
// `out` must be a valid pointer. The string must be released with
// `cp_string_free`.
enum CpStatus cp_feit_fine(uint32_t d, uint64_t q, char **out);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void cp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COMMPROB_H */
