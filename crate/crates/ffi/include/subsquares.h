#ifndef SUBSQUARES_H
#define SUBSQUARES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every call.
 */
typedef enum SsStatus {
  SS_STATUS_OK = 0,
  /**
   * No realization exists.
   */
  SS_STATUS_NONEXISTENT = 1,
  /**
   * The partition lies outside the supported families.
   */
  SS_STATUS_OUT_OF_SCOPE = 2,
  /**
   * Null pointer, bad length, malformed square or partition.
   */
  SS_STATUS_INVALID_ARGUMENT = 3,
  /**
   * The square does not realize the partition.
   */
  SS_STATUS_NOT_VERIFIED = 4,
  /**
   * Internal failure, including caught panics.
   */
  SS_STATUS_INTERNAL = 5,
} SsStatus;

/**
 * A latin square with optional subsquare blocks.
 */
typedef struct SsSquare SsSquare;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after success.
 * Valid until the next call on the same thread.
 */
const char *ss_last_error(void);

/**
 * Existence verdict: `*verdict` is 1 (exists), 0 (does not) or -1
 * (unknown).
 *
 * # Safety
 * `parts` must point to `len` values and `verdict` must be writable.
 */
enum SsStatus ss_exists(const size_t *parts, size_t len, int32_t *verdict);

/**
 * Builds a verified realization of the partition, blocks in non-increasing
 * order of size along the diagonal.
 *
 * # Safety
 * `parts` must point to `len` values; `out` must be writable. Free the
 * result with `ss_square_free`.
 */
enum SsStatus ss_construct(const size_t *parts, size_t len, struct SsSquare **out);

/**
 * Incomplete latin square of order `n` with disjoint holes of the given
 * orders, blocks in request order.
 *
 * # Safety
 * As for `ss_construct`.
 */
enum SsStatus ss_construct_ils(size_t n, const size_t *holes, size_t len, struct SsSquare **out);

/**
 * Wraps a caller's square given as `n * n` row-major 1-based symbols.
 *
 * # Safety
 * `cells` must point to `n * n` values; `out` must be writable.
 */
enum SsStatus ss_square_from_cells(size_t n, const uint32_t *cells, struct SsSquare **out);

/**
 * Order of the square, or 0 for a null handle.
 *
 * # Safety
 * `sq` must be null or a live handle.
 */
size_t ss_square_order(const struct SsSquare *sq);

/**
 * Copies the `n * n` row-major 1-based cells into `buf`.
 *
 * # Safety
 * `sq` must be a live handle and `buf` must hold `buf_len` values.
 */
enum SsStatus ss_square_cells(const struct SsSquare *sq, uint32_t *buf, size_t buf_len);

/**
 * Number of subsquare blocks the handle carries (0 for wrapped squares).
 *
 * # Safety
 * `sq` must be null or a live handle.
 */
size_t ss_square_block_count(const struct SsSquare *sq);

/**
 * Inclusive 1-based ranges of block `index`, written to `ranges` as
 * row_lo, row_hi, col_lo, col_hi, sym_lo, sym_hi.
 *
 * # Safety
 * `sq` must be a live handle and `ranges` must hold six values.
 */
enum SsStatus ss_square_block(const struct SsSquare *sq, size_t index, size_t *ranges);

/**
 * Checks that the square realizes the partition: against the handle's own
 * blocks when it has them, otherwise in normal form.
 *
 * # Safety
 * `sq` must be a live handle; `parts` must point to `len` values.
 */
enum SsStatus ss_verify(const struct SsSquare *sq, const size_t *parts, size_t len);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `sq` must be null or a handle not yet freed.
 */
void ss_square_free(struct SsSquare *sq);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SUBSQUARES_H */
