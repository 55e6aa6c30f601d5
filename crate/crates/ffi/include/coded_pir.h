#ifndef CODED_PIR_H
#define CODED_PIR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CpStatus {
  CpStatus_Ok = 0,
  CpStatus_NullPointer = 1,
  CpStatus_InvalidArgument = 2,
  CpStatus_Verification = 3,
  CpStatus_OutOfRange = 4,
  CpStatus_Failure = 5,
  CpStatus_Panic = 6,
} CpStatus;

/**
 * A verified recovery scheme: a PIR code or an array code.
 */
typedef struct CpCode CpCode;

/**
 * A database distributed over the servers of a code.
 */
typedef struct CpStore CpStore;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until
 * the next call on the same thread.
 */
const char *cp_last_error(void);

/**
 * Static version string.
 */
const char *cp_version(void);

/**
 * Parses and verifies a PIR code or array code certificate (JSON).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum CpStatus cp_code_from_json(const char *json, struct CpCode **out);

/**
 * Built-in codes: 0 is the `[8,4]` 3-server code, 1 the GF(4) `[5,2]`
 * code, 2 and 3 the array codes for `t = 2, 3`.
 *
 * # Safety
 * `out` must be writable.
 */
enum CpStatus cp_code_builtin(uint32_t which, struct CpCode **out);

/**
 * # Safety
 * `code` must come from this library and not be freed twice.
 */
void cp_code_free(struct CpCode *code);

/**
 * Servers, cells per server, message parts, recipes per part, and field
 * order. Any output pointer may be null.
 *
 * # Safety
 * `code` must be a live handle.
 */
enum CpStatus cp_code_params(const struct CpCode *code,
                             size_t *servers,
                             size_t *rows,
                             size_t *parts,
                             size_t *k,
                             uint32_t *q);

/**
 * Distributes `n` symbols over the servers of `code`.
 *
 * # Safety
 * `symbols` must point to `n` bytes; `code` must be live; `out` writable.
 */
enum CpStatus cp_store_new(const struct CpCode *code,
                           const uint8_t *symbols,
                           size_t n,
                           struct CpStore **out);

/**
 * # Safety
 * `store` must come from this library and not be freed twice.
 */
void cp_store_free(struct CpStore *store);

/**
 * Retrieves position `i` with the `protocol_k`-server XOR protocol (0
 * means the code's `k`), using a tape seeded with `seed`. The payload bit
 * counts are checked against the closed form before returning.
 *
 * # Safety
 * `store` must be live; `value` writable; `up_bits`, `down_bits` null or
 * writable.
 */
enum CpStatus cp_retrieve(const struct CpStore *store,
                          size_t protocol_k,
                          size_t i,
                          uint64_t seed,
                          uint8_t *value,
                          uint64_t *up_bits,
                          uint64_t *down_bits);

/**
 * Best known lower and upper bounds on the length of a binary `k`-server
 * PIR code of dimension `s`.
 *
 * # Safety
 * `lower` and `upper` must be writable.
 */
enum CpStatus cp_bounds_cell(size_t s, size_t k, size_t *lower, size_t *upper);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CODED_PIR_H */
