#ifndef PHDIM_H
#define PHDIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum PhdimStatus {
  PHDIM_STATUS_OK = 0,
  PHDIM_STATUS_NULL_POINTER = 1,
  PHDIM_STATUS_INVALID_UTF8 = 2,
  PHDIM_STATUS_SIZE_ERROR = 3,
  PHDIM_STATUS_PARAM_ERROR = 4,
  PHDIM_STATUS_TOO_FEW_POINTS = 5,
  PHDIM_STATUS_UNSTABLE_ESTIMATE = 6,
  PHDIM_STATUS_DEGENERATE_CLOUD = 7,
  PHDIM_STATUS_DATA_ERROR = 8,
  PHDIM_STATUS_FORMAT_ERROR = 9,
  PHDIM_STATUS_IO_ERROR = 10,
  PHDIM_STATUS_PANIC = 11,
} PhdimStatus;

/**
 * Opaque point cloud.
 */
typedef struct PhdimCloud PhdimCloud;

/**
 * Opaque PHD result.
 */
typedef struct PhdimEstimate PhdimEstimate;

/**
 * Opaque detector model.
 */
typedef struct PhdimModel PhdimModel;

/**
 * PHD estimator parameters. Obtain defaults from [`phdim_phd_params_default`].
 */
typedef struct PhdimPhdParams {
  double alpha;
  size_t k_grid;
  size_t j_samples;
  size_t rounds;
  size_t min_subsample;
  uint64_t seed;
  /**
   * Nonzero to sample from lexicographically sorted points.
   */
  uint8_t canonical_order;
} PhdimPhdParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *phdim_last_error(void);

/**
 * Static name of a status code.
 */
const char *phdim_status_name(enum PhdimStatus status);

struct PhdimPhdParams phdim_phd_params_default(void);

/**
 * Copies `n_points * dim` row-major coordinates into a new cloud.
 *
 * # Safety
 * `coords` must point to `n_points * dim` doubles; `id` must be a
 * NUL-terminated string; `out` must be writable.
 */
enum PhdimStatus phdim_cloud_new(const double *coords,
                                 size_t n_points,
                                 size_t dim,
                                 const char *id,
                                 struct PhdimCloud **out);

/**
 * Reads an EMB1 file.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PhdimStatus phdim_cloud_read_emb(const char *path, struct PhdimCloud **out);

/**
 * Writes a cloud as EMB1 (coordinates narrowed to float).
 *
 * # Safety
 * `cloud` must come from this library; `path` must be a NUL-terminated string.
 */
enum PhdimStatus phdim_cloud_write_emb(const struct PhdimCloud *cloud, const char *path);

/**
 * # Safety
 * `cloud` must come from this library or be NULL.
 */
size_t phdim_cloud_len(const struct PhdimCloud *cloud);

/**
 * # Safety
 * `cloud` must come from this library or be NULL.
 */
size_t phdim_cloud_dim(const struct PhdimCloud *cloud);

/**
 * # Safety
 * `cloud` must come from this library or be NULL; it must not be used after.
 */
void phdim_cloud_free(struct PhdimCloud *cloud);

/**
 * Total weight of the Euclidean minimum spanning tree.
 *
 * # Safety
 * `cloud` must come from this library; `out` must be writable.
 */
enum PhdimStatus phdim_mst_total_weight(const struct PhdimCloud *cloud, double *out);

/**
 * Sum of MST edge lengths raised to `alpha`.
 *
 * # Safety
 * `cloud` must come from this library; `out` must be writable.
 */
enum PhdimStatus phdim_persistence_score(const struct PhdimCloud *cloud, double alpha, double *out);

/**
 * PHD estimate. `params` may be NULL for defaults.
 *
 * # Safety
 * `cloud` must come from this library; `params` NULL or valid; `out` writable.
 */
enum PhdimStatus phdim_phd_estimate(const struct PhdimCloud *cloud,
                                    const struct PhdimPhdParams *params,
                                    struct PhdimEstimate **out);

/**
 * # Safety
 * `est` must come from this library or be NULL.
 */
double phdim_estimate_value(const struct PhdimEstimate *est);

/**
 * Number of per-round slopes.
 *
 * # Safety
 * `est` must come from this library or be NULL.
 */
size_t phdim_estimate_slope_count(const struct PhdimEstimate *est);

/**
 * Copies up to `len` slopes into `buf`; returns the number copied.
 *
 * # Safety
 * `est` must come from this library or be NULL; `buf` must hold `len` doubles.
 */
size_t phdim_estimate_slopes(const struct PhdimEstimate *est, double *buf, size_t len);

/**
 * # Safety
 * `est` must come from this library or be NULL; it must not be used after.
 */
void phdim_estimate_free(struct PhdimEstimate *est);

/**
 * Levina–Bickel MLE dimension with `k_neighbors` neighbours.
 *
 * # Safety
 * `cloud` must come from this library; `out` must be writable.
 */
enum PhdimStatus phdim_mle_estimate(const struct PhdimCloud *cloud,
                                    size_t k_neighbors,
                                    double *out);

/**
 * ROC-AUC with generated texts as the positive class at low scores.
 *
 * # Safety
 * The score pointers must hold the given number of doubles; `out` writable.
 */
enum PhdimStatus phdim_roc_auc(const double *human,
                               size_t n_human,
                               const double *generated,
                               size_t n_generated,
                               double *out);

/**
 * Threshold flagging at most `target_fpr` of the human scores.
 *
 * # Safety
 * `human` must hold `n_human` doubles; `out` must be writable.
 */
enum PhdimStatus phdim_model_fit_fpr(const double *human,
                                     size_t n_human,
                                     double target_fpr,
                                     struct PhdimModel **out);

/**
 * Equal-error-rate threshold; writes the achieved EER to `eer` if non-NULL.
 *
 * # Safety
 * Score pointers must hold the given counts; `out` writable; `eer` NULL or writable.
 */
enum PhdimStatus phdim_model_fit_eer(const double *human,
                                     size_t n_human,
                                     const double *generated,
                                     size_t n_generated,
                                     struct PhdimModel **out,
                                     double *eer);

/**
 * Loads a model document written by `phdim fit`.
 *
 * # Safety
 * `path` must be a NUL-terminated string; `out` must be writable.
 */
enum PhdimStatus phdim_model_load(const char *path, struct PhdimModel **out);

/**
 * Decision threshold of a threshold model; NaN for logistic models.
 *
 * # Safety
 * `model` must come from this library or be NULL.
 */
double phdim_model_threshold(const struct PhdimModel *model);

/**
 * Writes 1 to `is_generated` if the score is classified as generated, else 0.
 *
 * # Safety
 * `model` must come from this library; `is_generated` must be writable.
 */
enum PhdimStatus phdim_model_classify(const struct PhdimModel *model,
                                      double score,
                                      int32_t *is_generated);

/**
 * # Safety
 * `model` must come from this library or be NULL; it must not be used after.
 */
void phdim_model_free(struct PhdimModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PHDIM_H */
