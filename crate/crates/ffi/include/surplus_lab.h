#ifndef SURPLUS_LAB_H
#define SURPLUS_LAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SlMode {
  SL_MODE_BF = 0,
  SL_MODE_DF = 1,
} SlMode;

typedef enum SlStatus {
  SL_STATUS_OK = 0,
  SL_STATUS_NULL_POINTER = 1,
  SL_STATUS_INVALID_ARGUMENT = 2,
  SL_STATUS_CAP_EXCEEDED = 3,
  SL_STATUS_DOMAIN = 4,
  SL_STATUS_IO = 5,
  SL_STATUS_OVERFLOW = 6,
  SL_STATUS_BUFFER_TOO_SMALL = 7,
  SL_STATUS_PANIC = 8,
} SlStatus;

/**
 * A lattice excursion `f ∈ 𝔉ₙ`.
 */
typedef struct SlExcursion SlExcursion;

/**
 * A rooted map.
 */
typedef struct SlMap SlMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *sl_last_error(void);

/**
 * Library version, static storage.
 */
const char *sl_version(void);

/**
 * # Safety
 * `s` must come from this library, or be null.
 */
void sl_string_free(char *s);

/**
 * Uniform excursion with `2n` steps from replicate stream `stream` of `seed`.
 *
 * # Safety
 * `out_handle` must be a valid pointer.
 */
enum SlStatus sl_excursion_sample(size_t n,
                                  uint64_t seed,
                                  uint64_t stream,
                                  struct SlExcursion **out_handle);

/**
 * Parses a `U`/`D` word.
 *
 * # Safety
 * `steps` must be a NUL-terminated string and `out_handle` a valid pointer.
 */
enum SlStatus sl_excursion_from_steps(const char *steps, struct SlExcursion **out_handle);

/**
 * # Safety
 * `e` must come from this library, or be null.
 */
void sl_excursion_free(struct SlExcursion *e);

/**
 * Writes `n`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SlStatus sl_excursion_n(const struct SlExcursion *e, size_t *n);

/**
 * Copies `f(0), …, f(2n)` into `buf`. `written` receives `2n + 1` even
 * when `len` is too small.
 *
 * # Safety
 * `buf` must hold `len` values; other pointers must be valid.
 */
enum SlStatus sl_excursion_values(const struct SlExcursion *e,
                                  uint32_t *buf,
                                  size_t len,
                                  size_t *written);

/**
 * Total corner weight `B(f)` or `D(f)`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SlStatus sl_excursion_weight(const struct SlExcursion *e, enum SlMode mode, uint64_t *total);

/**
 * Number of admissible corner tuples for the pairing `sigma`, written like
 * `(1,3)(2,4)`.
 *
 * # Safety
 * `sigma` must be NUL-terminated; other pointers must be valid.
 */
enum SlStatus sl_psi_count(const struct SlExcursion *e, const char *sigma, uint64_t *count);

/**
 * Whether the pairing lies in `𝕊_g`, the pairings that glue a single face.
 *
 * # Safety
 * `sigma` must be NUL-terminated; `result` must be valid.
 */
enum SlStatus sl_sg_check(const char *sigma, bool *result);

/**
 * `ω_s`, for `1 <= s <= 12`.
 *
 * # Safety
 * `value` must be valid.
 */
enum SlStatus sl_wright(size_t s, uint64_t *value);

/**
 * Builds the map of `e` decorated by `corners`, a JSON object
 * `{"mode": "bf", "i": [...], "k": [...]}`; an empty string means no
 * extra edges.
 *
 * # Safety
 * `corners` must be NUL-terminated; other pointers must be valid.
 */
enum SlStatus sl_map_insert(const struct SlExcursion *e,
                            const char *corners,
                            struct SlMap **out_handle);

/**
 * One proposal draw for the uniform map with `n` tree edges and surplus
 * `s`, with its importance weight.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SlStatus sl_map_sample(size_t n,
                            size_t s,
                            uint64_t seed,
                            uint64_t stream,
                            struct SlMap **out_handle,
                            double *weight);

/**
 * # Safety
 * `json` must be NUL-terminated and `out_handle` valid.
 */
enum SlStatus sl_map_from_json(const char *json, struct SlMap **out_handle);

/**
 * JSON text of the map; free with [`sl_string_free`].
 *
 * # Safety
 * Pointers must be valid.
 */
enum SlStatus sl_map_to_json(const struct SlMap *m, char **json);

/**
 * # Safety
 * `m` must come from this library, or be null.
 */
void sl_map_free(struct SlMap *m);

/**
 * # Safety
 * Pointers must be valid.
 */
enum SlStatus sl_map_genus(const struct SlMap *m, size_t *genus);

/**
 * # Safety
 * Pointers must be valid.
 */
enum SlStatus sl_map_faces(const struct SlMap *m, size_t *faces);

/**
 * Largest graph distance from the root vertex.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SlStatus sl_map_radius(const struct SlMap *m, uint32_t *radius);

/**
 * Writes `(n, s)`: tree edges and surplus.
 *
 * # Safety
 * Pointers must be valid.
 */
enum SlStatus sl_map_size(const struct SlMap *m, size_t *n, size_t *s);

/**
 * Breadth-first or depth-first encoding: the contour as a new excursion
 * handle and the corners as JSON (free with [`sl_string_free`]).
 *
 * # Safety
 * Pointers must be valid.
 */
enum SlStatus sl_map_explore(const struct SlMap *m,
                             enum SlMode mode,
                             struct SlExcursion **contour,
                             char **corners);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SURPLUS_LAB_H */
