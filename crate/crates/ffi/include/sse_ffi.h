#ifndef SSE_FFI_H
#define SSE_FFI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SseRoute {
  SSE_ROUTE_PREFER_SAME_SIZE = 0,
  SSE_ROUTE_SAME_SIZE_ONLY = 1,
  SSE_ROUTE_SPLIT_ONLY = 2,
} SseRoute;

/**
 * Status codes. `0..=5` match the exit codes of the `sse` binary.
 */
typedef enum SseStatus {
  SSE_STATUS_OK = 0,
  SSE_STATUS_VERIFY_FAILED = 1,
  SSE_STATUS_PARSE = 2,
  SSE_STATUS_PRECONDITION = 3,
  SSE_STATUS_SIZE_CAP = 4,
  SSE_STATUS_SAME_SIZE_UNAVAILABLE = 5,
  SSE_STATUS_NULL_POINTER = 10,
  SSE_STATUS_INTERNAL = 11,
  SSE_STATUS_PANIC = 12,
} SseStatus;

/**
 * Opaque exact rational matrix.
 */
typedef struct SseMatrix SseMatrix;

/**
 * Opaque result of [`sse_make_doubly`].
 */
typedef struct SsePipeline SsePipeline;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null after a
 * successful call. Valid until the next call on the same thread.
 */
const char *sse_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void sse_string_free(char *s);

/**
 * Parses a matrix document `{"rows", "cols", "entries"}` with rational
 * literal strings.
 *
 * # Safety
 * `json` must be a nul-terminated string; `out` must be writable.
 */
enum SseStatus sse_matrix_from_json(const char *json, struct SseMatrix **out);

/**
 * Builds a `rows x cols` matrix from `rows * cols` rational literals in
 * row-major order.
 *
 * # Safety
 * `entries` must point to `rows * cols` nul-terminated strings.
 */
enum SseStatus sse_matrix_from_literals(uintptr_t rows,
                                        uintptr_t cols,
                                        const char *const *entries,
                                        struct SseMatrix **out);

/**
 * # Safety
 * `m` must come from this library and not have been freed. Null is ignored.
 */
void sse_matrix_free(struct SseMatrix *m);

/**
 * # Safety
 * `m` must be a live matrix handle; `rows` and `cols` must be writable.
 */
enum SseStatus sse_matrix_shape(const struct SseMatrix *m, uintptr_t *rows, uintptr_t *cols);

/**
 * Entry `(i, j)` (0-based) as a rational literal.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must be writable.
 */
enum SseStatus sse_matrix_entry(const struct SseMatrix *m, uintptr_t i, uintptr_t j, char **out);

/**
 * # Safety
 * `m` must be a live matrix handle; `out` must be writable.
 */
enum SseStatus sse_matrix_to_json(const struct SseMatrix *m, char **out);

/**
 * One-line stochastic profile, e.g. `positive doubly stochastic primitive`.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must be writable.
 */
enum SseStatus sse_classify(const struct SseMatrix *m, char **out);

/**
 * Left Perron vector of an irreducible stochastic matrix, formatted as
 * `(2/5, 2/5, 1/5)`.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must be writable.
 */
enum SseStatus sse_left_perron(const struct SseMatrix *m, char **out);

/**
 * Runs the pipeline to a positive doubly stochastic matrix. `route` is an
 * [`SseRoute`] value; `size_cap` 0 selects the default cap; `max_den` 0
 * skips re-denomination.
 *
 * # Safety
 * `m` must be a live matrix handle; `out` must be writable.
 */
enum SseStatus sse_make_doubly(const struct SseMatrix *m,
                               int32_t route,
                               uint64_t max_den,
                               uintptr_t size_cap,
                               struct SsePipeline **out);

/**
 * # Safety
 * `p` must come from this library and not have been freed. Null is ignored.
 */
void sse_pipeline_free(struct SsePipeline *p);

/**
 * Lag and size of the emitted chain; `same_size` is 1 on the same-size
 * route.
 *
 * # Safety
 * `p` must be a live pipeline handle; out-pointers must be writable.
 */
enum SseStatus sse_pipeline_info(const struct SsePipeline *p,
                                 uintptr_t *lag,
                                 uintptr_t *size,
                                 int32_t *same_size);

/**
 * A copy of the doubly stochastic output.
 *
 * # Safety
 * `p` must be a live pipeline handle; `out` must be writable.
 */
enum SseStatus sse_pipeline_output(const struct SsePipeline *p, struct SseMatrix **out);

/**
 * The chain document accepted by [`sse_verify_chain_json`] and `sse verify`.
 *
 * # Safety
 * `p` must be a live pipeline handle; `out` must be writable.
 */
enum SseStatus sse_pipeline_chain_json(const struct SsePipeline *p, char **out);

/**
 * Verifies a chain document. Returns `SSE_STATUS_OK` when it passes and
 * `SSE_STATUS_VERIFY_FAILED` when it does not; in both cases `report`
 * (if non-null) receives the per-step report.
 *
 * # Safety
 * `json` must be a nul-terminated string; `report` may be null.
 */
enum SseStatus sse_verify_chain_json(const char *json, char **report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SSE_FFI_H */
