#ifndef PERCOLAB_H
#define PERCOLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PercolabStatus {
  PERCOLAB_STATUS_OK = 0,
  PERCOLAB_STATUS_NULL_POINTER = 1,
  PERCOLAB_STATUS_INVALID_ARGUMENT = 2,
  PERCOLAB_STATUS_SIZE_CAP = 3,
  PERCOLAB_STATUS_DEGENERATE = 4,
  PERCOLAB_STATUS_RETRY_CAP_EXHAUSTED = 5,
  PERCOLAB_STATUS_PANIC = 6,
} PercolabStatus;

typedef enum PercolabLattice {
  PERCOLAB_LATTICE_TORUS = 0,
  PERCOLAB_LATTICE_BOX = 1,
  PERCOLAB_LATTICE_CYCLE = 2,
} PercolabLattice;

/**
 * Opaque graph handle.
 */
typedef struct PercolabGraph PercolabGraph;

typedef struct PercolabEstimate {
  double mean;
  double ci_half_width;
  double z;
  uint64_t trials;
  uint64_t seed;
} PercolabEstimate;

typedef struct PercolabPcResult {
  double p_c_hat;
  double p_lo;
  double p_hi;
  uint64_t total_trials;
  uint32_t steps;
  bool degraded;
} PercolabPcResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * NUL-terminated version string with static lifetime.
 */
const char *percolab_version(void);

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library from the same thread.
 */
const char *percolab_last_error(void);

/**
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum PercolabStatus percolab_graph_lattice(enum PercolabLattice kind,
                                           size_t n,
                                           size_t d,
                                           struct PercolabGraph **out);

/**
 * # Safety
 * `out` must be valid for writing one pointer.
 */
enum PercolabStatus percolab_graph_random_regular(size_t n,
                                                  size_t d,
                                                  uint64_t seed,
                                                  struct PercolabGraph **out);

/**
 * # Safety
 * `g` must be NULL or a handle not yet freed.
 */
void percolab_graph_free(struct PercolabGraph *g);

/**
 * Number of vertices, or 0 for a NULL handle.
 *
 * # Safety
 * `g` must be NULL or a live handle.
 */
size_t percolab_graph_vertex_count(const struct PercolabGraph *g);

/**
 * # Safety
 * `g` must be a live handle and `out` valid for one write.
 */
enum PercolabStatus percolab_graph_degree(const struct PercolabGraph *g, size_t v, size_t *out);

/**
 * Runs the `k`-neighbour closure from `init` (`len` bytes, nonzero meaning
 * occupied). When `final_occupied` is non-NULL it receives `len` bytes of
 * 0/1 flags.
 *
 * # Safety
 * `init` must point to `len` readable bytes, `final_occupied` to `len`
 * writable bytes or be NULL, and `complete` must be valid for one write.
 */
enum PercolabStatus percolab_closure(const struct PercolabGraph *g,
                                     size_t k,
                                     const uint8_t *init,
                                     size_t len,
                                     uint8_t *final_occupied,
                                     bool *complete);

/**
 * # Safety
 * `g` must be a live handle and `out` valid for one write.
 */
enum PercolabStatus percolab_estimate_success(const struct PercolabGraph *g,
                                              size_t k,
                                              double p,
                                              uint64_t trials,
                                              uint64_t seed,
                                              struct PercolabEstimate *out);

/**
 * # Safety
 * `g` must be a live handle and `out` valid for one write.
 */
enum PercolabStatus percolab_estimate_noise_corr(const struct PercolabGraph *g,
                                                 size_t k,
                                                 double p,
                                                 double eps,
                                                 uint64_t trials,
                                                 uint64_t seed,
                                                 struct PercolabEstimate *out);

/**
 * # Safety
 * `g` must be a live handle and `out` valid for one write.
 */
enum PercolabStatus percolab_estimate_influence(const struct PercolabGraph *g,
                                                size_t k,
                                                double p,
                                                size_t vertex,
                                                uint64_t trials,
                                                uint64_t seed,
                                                struct PercolabEstimate *out);

/**
 * Critical density at `target` with absolute bracket width `precision`.
 *
 * # Safety
 * `g` must be a live handle and `out` valid for one write.
 */
enum PercolabStatus percolab_estimate_pc(const struct PercolabGraph *g,
                                         size_t k,
                                         double target,
                                         double precision,
                                         uint64_t trials_per_step,
                                         uint64_t seed,
                                         struct PercolabPcResult *out);

/**
 * Tree critical density. `y_star` receives NaN when the infimum is
 * attained only in the limit `y -> 0`.
 *
 * # Safety
 * `y_star` and `p_star` must be valid for one write each.
 */
enum PercolabStatus percolab_p_star(size_t d, size_t k, double *y_star, double *p_star);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERCOLAB_H */
