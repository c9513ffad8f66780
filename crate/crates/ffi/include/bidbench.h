#ifndef BIDBENCH_H
#define BIDBENCH_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BbStatus {
  BB_STATUS_OK = 0,
  BB_STATUS_NULL_POINTER = 1,
  BB_STATUS_INVALID_ARGUMENT = 2,
  BB_STATUS_IO = 3,
  BB_STATUS_PARSE = 4,
  BB_STATUS_EMPTY_SELECTION = 5,
  BB_STATUS_UNKNOWN_ALGORITHM = 6,
  BB_STATUS_CONFIG = 7,
  /*
   The requested metric has no value, e.g. REL_CPC without clicks.
   */
  BB_STATUS_UNDEFINED = 8,
  BB_STATUS_PANIC = 9,
} BbStatus;

/*
 Loaded or generated dataset.
 */
typedef struct BbDataset BbDataset;

/*
 Metrics of one experiment run.
 */
typedef struct BbReport BbReport;

/*
 Message of the last failed call on this thread, or null. Valid until
 the next call on the same thread.
 */
const char *bb_last_error(void);

/*
 Library version as a static string.
 */
const char *bb_version(void);

/*
 # Safety
 `s` must be null or a string returned by this library.
 */
void bb_string_free(char *s);

/*
 Bin index of `bid` under base `gamma`.

 # Safety
 `out` must be valid for writes.
 */
enum BbStatus bb_bin_of(double bid, double gamma, int32_t *out);

/*
 Loads `campaigns.csv`, `auction_stats.csv` and `traffic.csv` from `dir`.
 `auction` is `"vcg"` or `"fp"`.

 # Safety
 Strings must be nul-terminated; `out` must be valid for writes.
 */
enum BbStatus bb_dataset_load(const char *dir, const char *auction, struct BbDataset **out);

/*
 Generates a synthetic dataset with the default generator settings.

 # Safety
 `auction` must be nul-terminated; `out` must be valid for writes.
 */
enum BbStatus bb_dataset_synth(const char *auction,
                               uintptr_t n_campaigns,
                               uint64_t seed,
                               struct BbDataset **out);

/*
 Writes the three CSV files into `dir`, creating it if needed.

 # Safety
 `ds` must come from this library; `dir` must be nul-terminated.
 */
enum BbStatus bb_dataset_write(const struct BbDataset *ds, const char *dir);

/*
 # Safety
 `ds` must be null or a handle from this library not yet freed.
 */
void bb_dataset_free(struct BbDataset *ds);

/*
 # Safety
 `ds` must come from this library; `out` must be valid for writes.
 */
enum BbStatus bb_dataset_n_campaigns(const struct BbDataset *ds, uintptr_t *out);

/*
 Runs the load-time checks. `passed` receives whether all of them hold.

 # Safety
 `ds` must come from this library; `passed` must be valid for writes.
 */
enum BbStatus bb_dataset_validate(const struct BbDataset *ds, bool *passed);

/*
 Summary statistics as JSON; free the string with [`bb_string_free`].

 # Safety
 `ds` must come from this library; `out` must be valid for writes.
 */
enum BbStatus bb_dataset_describe_json(const struct BbDataset *ds, char **out);

/*
 Replays every campaign of `ds` with one algorithm.

 `params_json` is null or a JSON object of numeric overrides such as
 `{"b0": 500, "kp": 0.2}`. `cpc` is null (own budget), `"budget"`,
 `"category-div-10"` or `"fixed:<value>"`.

 # Safety
 `ds` must come from this library; strings must be null or
 nul-terminated; `out` must be valid for writes.
 */
enum BbStatus bb_experiment_run(const struct BbDataset *ds,
                                const char *algo,
                                const char *params_json,
                                const char *cpc,
                                struct BbReport **out);

/*
 Total clicks over all campaigns.

 # Safety
 `r` must come from this library; `out` must be valid for writes.
 */
enum BbStatus bb_report_scr(const struct BbReport *r, double *out);

/*
 Mean per-campaign pacing RMSE in money.

 # Safety
 `r` must come from this library; `out` must be valid for writes.
 */
enum BbStatus bb_report_rmse_t(const struct BbReport *r, double *out);

/*
 Realized CPC over the cap; [`BbStatus::Undefined`] when nothing was
 clicked.

 # Safety
 `r` must come from this library; `out` must be valid for writes.
 */
enum BbStatus bb_report_rel_cpc(const struct BbReport *r, double *out);

/*
 Full report, including per-campaign rows, as JSON.

 # Safety
 `r` must come from this library; `out` must be valid for writes.
 */
enum BbStatus bb_report_json(const struct BbReport *r, char **out);

/*
 # Safety
 `r` must be null or a handle from this library not yet freed.
 */
void bb_report_free(struct BbReport *r);

#endif  /* BIDBENCH_H */
