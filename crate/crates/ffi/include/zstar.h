#ifndef ZSTAR_H
#define ZSTAR_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * How an expansion ended.
 */
typedef enum ZstarExpansionEnd {
  ZSTAR_EXPANSION_END_TRUNCATED = 0,
  ZSTAR_EXPANSION_END_EXACT = 1,
  ZSTAR_EXPANSION_END_BOUNDARY_AMBIGUOUS = 2,
} ZstarExpansionEnd;

/**
 * Decomposition operation.
 */
typedef enum ZstarOp {
  ZSTAR_OP_SUM = 0,
  ZSTAR_OP_PRODUCT = 1,
  ZSTAR_OP_DIFFERENCE = 2,
  ZSTAR_OP_QUOTIENT = 3,
} ZstarOp;

/**
 * Result of every call.
 */
typedef enum ZstarStatus {
  ZSTAR_STATUS_OK = 0,
  ZSTAR_STATUS_NULL_POINTER = 1,
  ZSTAR_STATUS_INVALID_ARGUMENT = 2,
  ZSTAR_STATUS_INVALID_INDEX = 3,
  ZSTAR_STATUS_DIVERGENT = 4,
  ZSTAR_STATUS_OUT_OF_DOMAIN = 5,
  ZSTAR_STATUS_BELOW_RANGE = 6,
  ZSTAR_STATUS_PRECISION_INSUFFICIENT = 7,
  ZSTAR_STATUS_BUFFER_TOO_SMALL = 8,
  ZSTAR_STATUS_INTERNAL = 9,
} ZstarStatus;

/**
 * Opaque decomposition certificate.
 */
typedef struct ZstarCertificate ZstarCertificate;

/**
 * Opaque certified value.
 */
typedef struct ZstarEnclosure ZstarEnclosure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message (empty after a success).
 *
 * # Safety
 * `buf` must point to `cap` writable bytes; `needed` may be null.
 */
enum ZstarStatus zstar_last_error(char *buf, size_t cap, size_t *needed);

/**
 * Evaluates `zeta*(digits, tail)`; `tail = 0` means no tail, otherwise
 * the constant tail `{tail}^inf`. A divergent value yields an enclosure
 * that reports infinite.
 *
 * # Safety
 * `digits` must point to `len` values; `out` must be writable.
 */
enum ZstarStatus zstar_eval(const uint32_t *digits,
                            size_t len,
                            uint32_t tail,
                            uint32_t precision,
                            uint64_t truncation,
                            struct ZstarEnclosure **out);

/**
 * Midpoint and radius rounded to doubles (radius rounded up).
 *
 * # Safety
 * `h` must come from this library; `mid` and `rad` must be writable.
 */
enum ZstarStatus zstar_enclosure_bounds(const struct ZstarEnclosure *h, double *mid, double *rad);

/**
 * 1 if the value diverges, 0 otherwise, -1 for a null handle.
 *
 * # Safety
 * `h` must be null or come from this library.
 */
int zstar_enclosure_is_infinite(const struct ZstarEnclosure *h);

/**
 * Decimal rendering `mid +/- rad` with `digits` significant digits.
 *
 * # Safety
 * `h` from this library; `buf` must hold `cap` bytes; `needed` may be null.
 */
enum ZstarStatus zstar_enclosure_format(const struct ZstarEnclosure *h,
                                        uint32_t digits,
                                        char *buf,
                                        size_t cap,
                                        size_t *needed);

/**
 * # Safety
 * `h` must be null or come from [`zstar_eval`], and not be freed twice.
 */
void zstar_enclosure_free(struct ZstarEnclosure *h);

/**
 * Digit expansion of the decimal or fraction `x`. Up to `cap` digits are
 * written to `digits`; `written` receives the number of digits produced.
 *
 * # Safety
 * `x` is a NUL-terminated string; `digits` holds `cap` values; `written`
 * and `end` are writable.
 */
enum ZstarStatus zstar_expand(const char *x,
                              size_t depth,
                              uint32_t precision,
                              uint32_t *digits,
                              size_t cap,
                              size_t *written,
                              enum ZstarExpansionEnd *end);

/**
 * Certificate for `x = v1 op v2` with `v1, v2` in `eta(D_q)`.
 *
 * # Safety
 * `x` is a NUL-terminated string; `out` must be writable.
 */
enum ZstarStatus zstar_decompose(enum ZstarOp op,
                                 const char *x,
                                 uint32_t q,
                                 double tolerance,
                                 uint32_t precision,
                                 struct ZstarCertificate **out);

/**
 * Upper bound on `|v1 op v2 - x|`.
 *
 * # Safety
 * `h` from this library; `out` writable.
 */
enum ZstarStatus zstar_certificate_residual(const struct ZstarCertificate *h, double *out);

/**
 * Re-evaluates both components at doubled precision; `valid` receives 1
 * if the target stays within the residual bound.
 *
 * # Safety
 * `h` from this library; `valid` writable.
 */
enum ZstarStatus zstar_certificate_validate(const struct ZstarCertificate *h, int *valid);

/**
 * The certificate as a JSON object.
 *
 * # Safety
 * `h` from this library; `buf` holds `cap` bytes; `needed` may be null.
 */
enum ZstarStatus zstar_certificate_json(const struct ZstarCertificate *h,
                                        char *buf,
                                        size_t cap,
                                        size_t *needed);

/**
 * # Safety
 * `h` must be null or come from [`zstar_decompose`], and not be freed twice.
 */
void zstar_certificate_free(struct ZstarCertificate *h);

/**
 * Library version, a static NUL-terminated string.
 */
const char *zstar_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ZSTAR_H */
