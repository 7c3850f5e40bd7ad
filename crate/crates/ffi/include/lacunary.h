#ifndef LACUNARY_H
#define LACUNARY_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LacStatus {
  LAC_STATUS_OK = 0,
  LAC_STATUS_NULL_POINTER = 1,
  LAC_STATUS_INVALID_UTF8 = 2,
  LAC_STATUS_FIELD_ERROR = 3,
  LAC_STATUS_PARSE_ERROR = 4,
  LAC_STATUS_BOUND_ERROR = 5,
  LAC_STATUS_BUFFER_TOO_SMALL = 6,
  LAC_STATUS_NOT_APPLICABLE = 7,
  LAC_STATUS_PANIC = 8,
} LacStatus;

/**
 * A finite field.
 */
typedef struct LacField LacField;

/**
 * A sparse polynomial over a [`LacField`].
 */
typedef struct LacPoly LacPoly;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates `F_{p^k}` with the default modulus.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage.
 */
enum LacStatus lac_field_new(uint64_t p, uint32_t k, struct LacField **out);

/**
 * Parses a field spec such as `47`, `3^2` or `3^2:1,0,1`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string; `out` must be writable.
 */
enum LacStatus lac_field_parse(const char *spec, struct LacField **out);

/**
 * # Safety
 * `field` must come from this library and not have been freed; null is ignored.
 */
void lac_field_free(struct LacField *field);

/**
 * Field size, or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
uint64_t lac_field_q(const struct LacField *field);

/**
 * # Safety
 * `field` must be a live handle, `text` NUL-terminated, `out` writable.
 */
enum LacStatus lac_poly_parse(const struct LacField *field, const char *text, struct LacPoly **out);

/**
 * # Safety
 * `poly` must come from this library and not have been freed; null is ignored.
 */
void lac_poly_free(struct LacPoly *poly);

/**
 * Renders in the parse grammar.
 *
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum LacStatus lac_poly_render(const struct LacPoly *poly, char **out);

/**
 * # Safety
 * `s` must be null or a string returned by this library.
 */
void lac_string_free(char *s);

/**
 * Nonzero roots in ascending packed order. `*count` is always set to the
 * number of roots; if it exceeds `capacity` nothing is written to `buf`
 * and `LAC_STATUS_BUFFER_TOO_SMALL` is returned.
 *
 * # Safety
 * `poly` must be a live handle, `count` writable, and `buf` valid for
 * `capacity` writes (it may be null when `capacity` is 0).
 */
enum LacStatus lac_poly_roots(const struct LacPoly *poly,
                              uint64_t *buf,
                              size_t capacity,
                              size_t *count);

/**
 * Every bound as a JSON array. `d = 0` tries every divisor of `q - 1`.
 *
 * # Safety
 * `poly` must be a live handle and `out` writable.
 */
enum LacStatus lac_bound_all_json(const struct LacPoly *poly, uint64_t d, char **out);

/**
 * Smallest applicable bound. `d = 0` tries every divisor of `q - 1`.
 *
 * # Safety
 * `poly` must be a live handle and `value` writable.
 */
enum LacStatus lac_best_bound(const struct LacPoly *poly, uint64_t d, uint64_t *value);

/**
 * Message for the last failed call on this thread, or an empty string.
 * Valid until the next call into this library on the same thread.
 */
const char *lac_last_error_message(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LACUNARY_H */
