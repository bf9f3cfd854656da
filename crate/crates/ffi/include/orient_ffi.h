#ifndef ORIENT_FFI_H
#define ORIENT_FFI_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum OrientMethod {
  ORIENT_METHOD_RECURSION = 0,
  ORIENT_METHOD_ENUMERATION = 1,
} OrientMethod;

typedef enum OrientStatus {
  ORIENT_STATUS_OK = 0,
  ORIENT_STATUS_NULL_ARGUMENT = 1,
  ORIENT_STATUS_PARSE = 2,
  ORIENT_STATUS_INVALID_INPUT = 3,
  ORIENT_STATUS_INVALID_VERTEX = 4,
  ORIENT_STATUS_RESOURCE_LIMIT = 5,
  ORIENT_STATUS_IO = 6,
  ORIENT_STATUS_PANIC = 7,
} OrientStatus;

/**
 * Opaque graph handle.
 */
typedef struct OrientGraph OrientGraph;

typedef struct OrientEstimate {
  double estimate;
  double std_error;
  double ci_low;
  double ci_high;
  uint64_t samples;
} OrientEstimate;

typedef struct OrientSlack {
  double slack;
  double std_error;
  double p_first;
  double p_second;
  double p_both;
  uint64_t samples;
} OrientSlack;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *orient_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *orient_version(void);

/**
 * Parses an edge list (`u v bias` per line).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum OrientStatus orient_graph_parse(const char *text, struct OrientGraph **out);

/**
 * Builds a graph from parallel edge arrays of length `edge_count`.
 *
 * # Safety
 * The three arrays must hold `edge_count` elements; `out` must be writable.
 */
enum OrientStatus orient_graph_new(size_t vertex_count,
                                   const size_t *lows,
                                   const size_t *highs,
                                   const double *biases,
                                   size_t edge_count,
                                   struct OrientGraph **out);

/**
 * Complete graph on `n` vertices with every bias equal to `bias`.
 *
 * # Safety
 * `out` must be writable.
 */
enum OrientStatus orient_graph_complete(size_t n, double bias, struct OrientGraph **out);

/**
 * `width × height` grid; vertex `(x, y)` has id `y * width + x` and `bias`
 * is the probability of the rightward/upward direction.
 *
 * # Safety
 * `out` must be writable.
 */
enum OrientStatus orient_graph_grid(size_t width,
                                    size_t height,
                                    double bias,
                                    struct OrientGraph **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `graph` must come from this library and not be used afterwards.
 */
void orient_graph_free(struct OrientGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null (returns 0).
 */
size_t orient_graph_vertex_count(const struct OrientGraph *graph);

/**
 * # Safety
 * `graph` must be a live handle or null (returns 0).
 */
size_t orient_graph_edge_count(const struct OrientGraph *graph);

/**
 * Exact probability that some source reaches every target. One target
 * gives a connection probability, two a joint one.
 *
 * # Safety
 * `graph` must be a live handle, the vertex arrays must hold the stated
 * number of elements, and `out` must be writable.
 */
enum OrientStatus orient_exact(const struct OrientGraph *graph,
                               enum OrientMethod method,
                               const size_t *sources,
                               size_t source_count,
                               const size_t *targets,
                               size_t target_count,
                               double *out);

/**
 * Monte Carlo estimate of the same event as `orient_exact`. Results depend
 * only on `seed`, `streams` and `samples`.
 *
 * # Safety
 * As for `orient_exact`.
 */
enum OrientStatus orient_mc_estimate(const struct OrientGraph *graph,
                                     const size_t *sources,
                                     size_t source_count,
                                     const size_t *targets,
                                     size_t target_count,
                                     uint64_t samples,
                                     uint64_t seed,
                                     uint64_t streams,
                                     struct OrientEstimate *out);

/**
 * Monte Carlo estimate of `P(S→a, S→b) - P(S→a)·P(S→b)`.
 *
 * # Safety
 * As for `orient_exact`.
 */
enum OrientStatus orient_mc_slack(const struct OrientGraph *graph,
                                  const size_t *sources,
                                  size_t source_count,
                                  size_t a,
                                  size_t b,
                                  uint64_t samples,
                                  uint64_t seed,
                                  uint64_t streams,
                                  struct OrientSlack *out);

/**
 * Total variation distance between the reachable set of `root` under
 * unbiased orientation and its cluster under bond percolation at 1/2.
 *
 * # Safety
 * `graph` must be a live handle and `out` writable.
 */
enum OrientStatus orient_mcdiarmid_tv(const struct OrientGraph *graph, size_t root, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ORIENT_FFI_H */
