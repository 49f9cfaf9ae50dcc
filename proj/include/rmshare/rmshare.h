// SPDX-License-Identifier: Apache-2.0
/* C interface of the rmshare library. All functions return an rms_status; on failure the
 * message is available from rms_last_error() on the calling thread. Handles are opaque. */
#ifndef RMSHARE_RMSHARE_H
#define RMSHARE_RMSHARE_H

#include <stddef.h>
#include <stdint.h>

#if defined(RMSHARE_BUILDING_LIBRARY)
#define RMS_API __attribute__((visibility("default")))
#else
#define RMS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rms_status {
  RMS_OK = 0,
  RMS_ERR_CONFIG = 1,
  RMS_ERR_INVALID_ARGUMENT = 2,
  RMS_ERR_INFEASIBLE = 3,
  RMS_ERR_NUMERICAL = 4,
  RMS_ERR_IO = 5,
  RMS_ERR_INTERNAL = 6
} rms_status;

typedef struct rms_scenario rms_scenario;
typedef struct rms_solution rms_solution;

typedef struct rms_summary {
  double gamma;       /* min radar SINR, linear */
  double min_sinr_db;
  double pd;          /* detection probability of the weakest radar */
  double rate_ap;     /* deterministic-equivalent rate, bits/s/Hz */
  double rate_mc;     /* Monte Carlo ergodic rate, bits/s/Hz */
  int iterations;
  int converged;
} rms_summary;

typedef void (*rms_check_callback)(const char* name, int pass, const char* detail, void* user);

RMS_API const char* rms_version(void);
RMS_API const char* rms_last_error(void);
RMS_API const char* rms_status_name(rms_status status);

RMS_API rms_status rms_scenario_load(const char* path, rms_scenario** out);
RMS_API rms_status rms_scenario_parse(const char* text, rms_scenario** out);
RMS_API void rms_scenario_free(rms_scenario* scenario);
RMS_API rms_status rms_scenario_counts(const rms_scenario* scenario, size_t* num_bs, size_t* num_radars);
RMS_API rms_status rms_scenario_set_seed(rms_scenario* scenario, uint64_t seed);

/* estimator: "truth", "grid" or "curvefit". Writes solution.csv and trace.csv into out_dir. */
RMS_API rms_status rms_solve(const rms_scenario* scenario, const char* estimator, const char* out_dir,
                             rms_solution** out);
RMS_API void rms_solution_free(rms_solution* solution);
RMS_API rms_status rms_solution_powers(const rms_solution* solution, double* p_c, size_t num_bs, double* p_r,
                                       size_t num_radars);
RMS_API rms_status rms_solution_summary(const rms_solution* solution, rms_summary* out);
RMS_API size_t rms_solution_trace_length(const rms_solution* solution);
RMS_API rms_status rms_solution_trace(const rms_solution* solution, size_t index, double* gamma, double* rate_ap);

/* Writes <out_dir>/<kind>.csv; the path is copied into path_buf when it is non-null. */
RMS_API rms_status rms_run_experiment(const rms_scenario* scenario, const char* kind, const char* out_dir,
                                      char* path_buf, size_t buf_size);
RMS_API rms_status rms_emit_plotdata(const char* results_path, const char* out_path);
RMS_API rms_status rms_validate(const rms_scenario* scenario, rms_check_callback callback, void* user,
                                int* all_passed);
RMS_API rms_status rms_export_map(const rms_scenario* scenario, const char* tx_id, const char* out_path);

RMS_API rms_status rms_detection_threshold(double p_fa, int pulses, double* mu);
RMS_API rms_status rms_detection_probability(double rho, double mu, int pulses, double* pd);

#ifdef __cplusplus
}
#endif

#endif
