#ifndef LOFI_SCHED_H
#define LOFI_SCHED_H

/* Generated with cbindgen:0.29.4 */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum LofiStatus {
  LOFI_STATUS_OK = 0,
  LOFI_STATUS_NULL_POINTER = 1,
  LOFI_STATUS_INVALID_ARGUMENT = 2,
  LOFI_STATUS_ODD_UE_COUNT = 3,
  LOFI_STATUS_INVALID_CHANNEL = 4,
  LOFI_STATUS_PARSE = 5,
  LOFI_STATUS_IO = 6,
  LOFI_STATUS_ENUMERATION_CAP = 7,
  LOFI_STATUS_NUMERICAL = 8,
  LOFI_STATUS_BUFFER_TOO_SMALL = 9,
  LOFI_STATUS_PANIC = 10,
} LofiStatus;

typedef enum LofiAlgorithm {
  LOFI_ALGORITHM_LOFI = 0,
  LOFI_ALGORITHM_LOFI_PP = 1,
  LOFI_ALGORITHM_RANDOM = 2,
  LOFI_ALGORITHM_NO_SCHEDULING = 3,
  LOFI_ALGORITHM_GREEDY_MSE = 4,
  LOFI_ALGORITHM_EXHAUSTIVE = 5,
} LofiAlgorithm;

typedef enum LofiObjective {
  LOFI_OBJECTIVE_MIN_SINR = 0,
  LOFI_OBJECTIVE_SUM_MSE = 1,
} LofiObjective;

/**
 * Opaque channel matrix handle.
 */
typedef struct LofiChannel LofiChannel;

/**
 * Opaque scheduler result handle.
 */
typedef struct LofiReport LofiReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *lofi_version(void);

/**
 * Message for the last failed call on this thread, or null if none.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *lofi_last_error_message(void);

/**
 * Number of distinct slot-1 subsets of size `ue_count / 2`.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
enum LofiStatus lofi_partition_count(size_t ue_count, uint64_t *out);

/**
 * Build a channel from column-major real and imaginary parts, each of
 * length `antennas * ue_count`.
 *
 * # Safety
 * `re` and `im` must point to that many readable doubles; `out` must be
 * valid for writes.
 */
enum LofiStatus lofi_channel_from_parts(size_t antennas,
                                        size_t ue_count,
                                        const double *re,
                                        const double *im,
                                        struct LofiChannel **out);

/**
 * Load a channel from a text channel file.
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string; `out` must be valid for writes.
 */
enum LofiStatus lofi_channel_load(const char *path, struct LofiChannel **out);

/**
 * Draw a synthetic multipath channel. Pass `INFINITY` as `k_factor_db`
 * for a pure line-of-sight channel.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum LofiStatus lofi_channel_synth(size_t antennas,
                                   size_t ue_count,
                                   size_t paths,
                                   double k_factor_db,
                                   double angle_spread,
                                   uint64_t seed,
                                   struct LofiChannel **out);

/**
 * # Safety
 * `channel` must be a live handle; `antennas` and `ue_count` may be null.
 */
enum LofiStatus lofi_channel_dims(const struct LofiChannel *channel,
                                  size_t *antennas,
                                  size_t *ue_count);

/**
 * # Safety
 * `channel` must be null or a handle not yet freed.
 */
void lofi_channel_free(struct LofiChannel *channel);

/**
 * Schedule the UEs of `channel` into two slots.
 *
 * `restarts` only matters for the LoFi variants. `n0_over_es` is the noise
 * to symbol energy ratio used in the objective. `enumeration_cap` bounds
 * exhaustive search; pass 0 for the library default.
 *
 * # Safety
 * `channel` must be a live handle; `out` must be valid for writes.
 */
enum LofiStatus lofi_schedule(const struct LofiChannel *channel,
                              enum LofiAlgorithm algorithm,
                              size_t restarts,
                              enum LofiObjective objective,
                              uint64_t seed,
                              double n0_over_es,
                              uint64_t enumeration_cap,
                              struct LofiReport **out);

/**
 * Whether the report deploys a two-slot split. Schedulers that keep every
 * UE in both slots return false.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
bool lofi_report_is_split(const struct LofiReport *report);

/**
 * Number of UEs in each slot of the deployed schedule.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
size_t lofi_report_slot_len(const struct LofiReport *report);

/**
 * Copy the 0-based UE indices of both slots into caller buffers of
 * `capacity` entries each.
 *
 * # Safety
 * `report` must be a live handle; `slot1` and `slot2` must be valid for
 * `capacity` writes.
 */
enum LofiStatus lofi_report_slots(const struct LofiReport *report,
                                  size_t *slot1,
                                  size_t *slot2,
                                  size_t capacity);

/**
 * Objective value of the deployed schedule (larger is better), or NaN for
 * a null handle.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
double lofi_report_objective(const struct LofiReport *report);

/**
 * # Safety
 * `report` must be null or a live handle.
 */
uint64_t lofi_report_evaluations(const struct LofiReport *report);

/**
 * Copy the post-equalization SINR of every UE (linear, indexed by UE)
 * into `out`, which holds `capacity` doubles.
 *
 * # Safety
 * `report` must be a live handle; `out` must be valid for `capacity` writes.
 */
enum LofiStatus lofi_report_sinr(const struct LofiReport *report, double *out, size_t capacity);

/**
 * # Safety
 * `report` must be null or a handle not yet freed.
 */
void lofi_report_free(struct LofiReport *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOFI_SCHED_H */
