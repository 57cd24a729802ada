#ifndef PADIC_CF_H
#define PADIC_CF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. Values above `Ok` mirror the library's error variants.
 */
typedef enum PcfStatus {
  PCF_STATUS_OK = 0,
  PCF_STATUS_NULL_POINTER = 1,
  PCF_STATUS_INVALID_UTF8 = 2,
  PCF_STATUS_PANIC = 3,
  PCF_STATUS_INVALID_PRIME = 10,
  PCF_STATUS_INVALID_CONTEXT = 11,
  PCF_STATUS_NON_RESIDUE = 12,
  PCF_STATUS_INVALID_INPUT = 13,
  PCF_STATUS_NEGATIVE_VALUATION = 14,
  PCF_STATUS_DIVISION_BY_ZERO = 15,
  PCF_STATUS_CONVENTION_MISMATCH = 16,
  PCF_STATUS_SCHNEIDER_DOMAIN = 17,
  PCF_STATUS_TERMINATED = 18,
  PCF_STATUS_INDEX_BEYOND_FINITE = 19,
  PCF_STATUS_NOT_FINITE = 20,
  PCF_STATUS_NOT_PERIODIC = 21,
  PCF_STATUS_INCONSISTENT_PERIOD = 22,
  PCF_STATUS_UNSUPPORTED_ALGORITHM = 23,
  PCF_STATUS_UNSUPPORTED_INPUT = 24,
  PCF_STATUS_DEGENERATE_Z = 25,
  PCF_STATUS_PARSE = 26,
} PcfStatus;

/**
 * Kind of a finished expansion.
 */
typedef enum PcfKind {
  PCF_KIND_FINITE = 0,
  PCF_KIND_PERIODIC = 1,
  PCF_KIND_TRUNCATED = 2,
} PcfKind;

/**
 * Opaque expansion handle.
 */
typedef struct PcfExpansion PcfExpansion;

/**
 * Termination data of an expansion. `pre_period` and `period` are set for
 * `Periodic`, `steps` for `Truncated`; unused fields are zero.
 */
typedef struct PcfStatusInfo {
  enum PcfKind kind;
  size_t pre_period;
  size_t period;
  size_t steps;
} PcfStatusInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call into the library.
 */
const char *pcf_last_error(void);

/**
 * Expands `value` (`a/b` or `quad:P,Q,D[,conj]`) at prime `p` with the named
 * algorithm. A `max_steps` of zero keeps the default budget.
 *
 * # Safety
 * `algorithm` and `value` must be nul-terminated strings; `out` must be
 * writable.
 */
enum PcfStatus pcf_expand(uint64_t p,
                          const char *algorithm,
                          const char *value,
                          size_t max_steps,
                          struct PcfExpansion **out);

/**
 * Parses an expansion from its JSON form.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum PcfStatus pcf_expansion_from_json(const char *json, struct PcfExpansion **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `e` must come from this library and not be used afterwards.
 */
void pcf_expansion_free(struct PcfExpansion *e);

/**
 * # Safety
 * `e` must be a live handle and `info` writable.
 */
enum PcfStatus pcf_expansion_status(const struct PcfExpansion *e, struct PcfStatusInfo *info);

/**
 * Number of stored partial quotients (pre-period plus one period for
 * periodic expansions).
 *
 * # Safety
 * `e` must be a live handle and `len` writable.
 */
enum PcfStatus pcf_expansion_len(const struct PcfExpansion *e, size_t *len);

/**
 * Partial quotient `a_n` as `num/den` text; periodic expansions extend
 * past the stored block.
 *
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
enum PcfStatus pcf_expansion_quotient(const struct PcfExpansion *e, size_t n, char **out);

/**
 * Text form, e.g. `[1, 44/7 | 48/7]`.
 *
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
enum PcfStatus pcf_expansion_to_string(const struct PcfExpansion *e, char **out);

/**
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
enum PcfStatus pcf_expansion_to_json(const struct PcfExpansion *e, char **out);

/**
 * Value of a periodic expansion as `a/b` or `quad:P,Q,D[,conj]`.
 *
 * # Safety
 * `e` must be a live handle and `out` writable.
 */
enum PcfStatus pcf_expansion_value(const struct PcfExpansion *e, char **out);

/**
 * Classification JSON, as printed by `padic-cf classify`.
 *
 * # Safety
 * `algorithm` and `value` must be nul-terminated strings; `out` writable.
 */
enum PcfStatus pcf_classify_json(uint64_t p,
                                 const char *algorithm,
                                 const char *value,
                                 size_t budget,
                                 char **out);

/**
 * Redei expansion `[z | -(h+2z)/(z^2+hz-d), h+2z]` at prime `p`.
 *
 * # Safety
 * `out` must be writable.
 */
enum PcfStatus pcf_redei(int64_t h, int64_t d, int64_t z, uint64_t p, struct PcfExpansion **out);

/**
 * Jacobi-Perron expansion of a comma-separated tuple, as JSON.
 *
 * # Safety
 * `values` must be a nul-terminated string; `out` writable.
 */
enum PcfStatus pcf_jp_json(uint64_t p, const char *values, size_t max_steps, char **out);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not be used afterwards.
 */
void pcf_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PADIC_CF_H */
