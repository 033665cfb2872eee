/* C interface to the network-slice interference detector.
 *
 * All objects are opaque handles owned by the caller and released with the
 * matching *_free function (NULL is accepted). Every fallible call returns an
 * nsi_status; on failure nsi_last_error() describes the problem for the
 * calling thread until its next failing call.
 */
#ifndef NSINTERF_H
#define NSINTERF_H

#include <stddef.h>
#include <stdint.h>

#if defined(NSI_BUILDING_LIBRARY)
#define NSI_API __attribute__((visibility("default")))
#else
#define NSI_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsi_status {
  NSI_OK = 0,
  NSI_ERR_INVALID_ARGUMENT = 1,
  NSI_ERR_OUT_OF_RANGE = 2,
  NSI_ERR_INFEASIBLE = 3,
  NSI_ERR_DEGENERATE = 4,
  NSI_ERR_PARSE = 5,
  NSI_ERR_IO = 6,
  NSI_ERR_INTERNAL = 7
} nsi_status;

typedef enum nsi_variant {
  NSI_VARIANT_SRCC = 0,         /* "fa" */
  NSI_VARIANT_MAX_PCC_SRCC = 1, /* "fa-max" */
  NSI_VARIANT_PCC = 2
} nsi_variant;

typedef struct nsi_sim_config nsi_sim_config;
typedef struct nsi_sim_output nsi_sim_output;
typedef struct nsi_kpi nsi_kpi;
typedef struct nsi_assignment nsi_assignment;
typedef struct nsi_detector nsi_detector;
typedef struct nsi_report nsi_report;
typedef struct nsi_sweep nsi_sweep;
typedef struct nsi_sweep_result nsi_sweep_result;
typedef struct nsi_corr_study nsi_corr_study;

typedef struct nsi_scorecard {
  double exact_fraction;
  double covered_fraction;
  int estimated_count;
  int has_stage1; /* nonzero when the report carried intermediates */
  int stage1_missed;
  int stage1_false_pos;
} nsi_scorecard;

NSI_API const char* nsi_version(void);
NSI_API const char* nsi_last_error(void);
NSI_API const char* nsi_status_name(nsi_status status);

/* Variant names: "fa", "fa-max", "pcc" or "SRCC", "MAX_PCC_SRCC", "PCC". */
NSI_API nsi_status nsi_parse_variant(const char* name, nsi_variant* out);

/* ---- simulation ---------------------------------------------------------- */

/* Key-value config file. A nonzero has_seed overrides the file's seed. */
NSI_API nsi_status nsi_sim_config_load(const char* path, int has_seed, uint64_t seed, nsi_sim_config** out);
/* Built-in scenarios: 1 (N=50, R=15) or 2 (N=20, R=6). */
NSI_API nsi_status nsi_sim_config_scenario(int scenario, int n_periods, double weight_shared,
                                           double noise_variance, uint64_t seed, nsi_sim_config** out);
NSI_API nsi_status nsi_sim_config_info(const nsi_sim_config* config, int* slices, int* resources, int* periods,
                                       uint64_t* seed);
NSI_API nsi_status nsi_sim_config_set_exp_averaging(nsi_sim_config* config, double alpha);
NSI_API void nsi_sim_config_free(nsi_sim_config* config);

NSI_API nsi_status nsi_simulate(const nsi_sim_config* config, nsi_sim_output** out);
NSI_API void nsi_sim_output_free(nsi_sim_output* output);
NSI_API nsi_status nsi_sim_output_dims(const nsi_sim_output* output, int* periods, int* slices, int* resources);
/* Borrowed views that live as long as the output. */
NSI_API const nsi_kpi* nsi_sim_output_measurements(const nsi_sim_output* output);
NSI_API const nsi_assignment* nsi_sim_output_truth(const nsi_sim_output* output);
/* Writes measurements.csv and truth.csv (and utilization.csv when with_trace
 * is nonzero) into dir, creating it if needed. */
NSI_API nsi_status nsi_sim_output_write(const nsi_sim_output* output, const char* dir, int with_trace);

/* ---- measurements and assignments ---------------------------------------- */

NSI_API nsi_status nsi_kpi_read(const char* path, nsi_kpi** out);
/* Row-major periods x slices copy. */
NSI_API nsi_status nsi_kpi_from_array(const double* values, int periods, int slices, nsi_kpi** out);
NSI_API nsi_status nsi_kpi_dims(const nsi_kpi* kpi, int* periods, int* slices);
NSI_API nsi_status nsi_kpi_write(const nsi_kpi* kpi, const char* path);
NSI_API void nsi_kpi_free(nsi_kpi* kpi);

NSI_API nsi_status nsi_assignment_read(const char* path, nsi_assignment** out);
/* Row-major resources x slices of 0/1. */
NSI_API nsi_status nsi_assignment_from_array(const uint8_t* entries, int resources, int slices,
                                             nsi_assignment** out);
NSI_API nsi_status nsi_assignment_dims(const nsi_assignment* a, int* resources, int* slices);
/* Copies resources*slices entries into buffer (capacity in bytes). */
NSI_API nsi_status nsi_assignment_entries(const nsi_assignment* a, uint8_t* buffer, size_t capacity);
NSI_API void nsi_assignment_free(nsi_assignment* a);

/* ---- detection ----------------------------------------------------------- */

NSI_API nsi_status nsi_detector_new(nsi_detector** out);
/* Applies detector keys (variant, theta, fa.*) from a key-value file. */
NSI_API nsi_status nsi_detector_load(nsi_detector* detector, const char* path);
NSI_API nsi_status nsi_detector_set_variant(nsi_detector* detector, nsi_variant variant);
NSI_API nsi_status nsi_detector_set_theta(nsi_detector* detector, double theta);
NSI_API nsi_status nsi_detector_set_intermediates(nsi_detector* detector, int enabled);
NSI_API void nsi_detector_free(nsi_detector* detector);

NSI_API nsi_status nsi_detect(const nsi_detector* detector, const nsi_kpi* kpi, nsi_report** out);
NSI_API nsi_status nsi_report_read(const char* path, nsi_report** out);
NSI_API nsi_status nsi_report_write(const nsi_report* report, const char* path);
/* Estimated assignment as a borrowed view. */
NSI_API const nsi_assignment* nsi_report_estimate(const nsi_report* report);
NSI_API size_t nsi_report_warning_count(const nsi_report* report);
NSI_API const char* nsi_report_warning(const nsi_report* report, size_t index);
NSI_API void nsi_report_free(nsi_report* report);

/* ---- evaluation ---------------------------------------------------------- */

NSI_API nsi_status nsi_evaluate(const nsi_assignment* truth, const nsi_report* report, nsi_scorecard* out);
NSI_API nsi_status nsi_scorecard_write(const nsi_scorecard* card, const char* path);

/* Sweep spec file; a nonzero has_seed overrides its seed. */
NSI_API nsi_status nsi_sweep_load(const char* path, int has_seed, uint64_t seed, nsi_sweep** out);
/* Restricts the grid to one variant. */
NSI_API nsi_status nsi_sweep_set_variant(nsi_sweep* sweep, nsi_variant variant);
NSI_API nsi_status nsi_sweep_set_theta(nsi_sweep* sweep, double theta);
NSI_API void nsi_sweep_free(nsi_sweep* sweep);
NSI_API nsi_status nsi_sweep_run(const nsi_sweep* sweep, nsi_sweep_result** out);
NSI_API size_t nsi_sweep_result_cells(const nsi_sweep_result* result);
NSI_API size_t nsi_sweep_result_partial_cells(const nsi_sweep_result* result);
NSI_API nsi_status nsi_sweep_result_write(const nsi_sweep_result* result, const char* path);
NSI_API void nsi_sweep_result_free(nsi_sweep_result* result);

NSI_API nsi_status nsi_corr_study_run(const nsi_sim_config* config, nsi_corr_study** out);
NSI_API size_t nsi_corr_study_pairs(const nsi_corr_study* study);
/* Stage-1 edge errors for the SRCC and PCC graphs. */
NSI_API nsi_status nsi_corr_study_errors(const nsi_corr_study* study, int* srcc_missed, int* srcc_false_pos,
                                         int* pcc_missed, int* pcc_false_pos);
/* Mean coefficients over sharing pairs. */
NSI_API nsi_status nsi_corr_study_sharing_means(const nsi_corr_study* study, double* srcc, double* pcc);
NSI_API nsi_status nsi_corr_study_write(const nsi_corr_study* study, const char* path);
NSI_API void nsi_corr_study_free(nsi_corr_study* study);

#ifdef __cplusplus
}
#endif

#endif /* NSINTERF_H */
