/* C interface to the Timoshenko beam solver.
 *
 * Every function returning tsb_status reports failures through the code and a
 * thread-local message available from tsb_last_error(). Handles are opaque and
 * owned by the caller; release them with the matching *_destroy function.
 */
#ifndef TIMOSHENKO_H
#define TIMOSHENKO_H

#include <stddef.h>
#include <stdint.h>

#if defined(TSB_BUILDING_LIBRARY)
#define TSB_API __attribute__((visibility("default")))
#else
#define TSB_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tsb_status {
  TSB_OK = 0,
  TSB_ERR_ARGUMENT = 1, /* invalid parameters or usage */
  TSB_ERR_NUMERIC = 2,  /* solver or quadrature failure */
  TSB_ERR_IO = 3,
  TSB_ERR_INTERNAL = 4
} tsb_status;

typedef enum tsb_format { TSB_FORMAT_CSV = 0, TSB_FORMAT_JSON = 1 } tsb_format;

/* Benchmark ids: 1..3 are the oscillatory tests, 0 the polynomial case that
 * the scheme reproduces to rounding. */
#define TSB_MACHINE_PRECISION_CASE 0

typedef struct tsb_params {
  double alpha, beta, gamma, delta, a1, a2;
  double length;
  double final_time;
  int steps; /* n, tau = final_time / n */
  int modes; /* N */
} tsb_params;

typedef struct tsb_options {
  int parallel;          /* nonzero: concurrent solves / study runs */
  int record_trajectory; /* nonzero: keep every layer's coefficients */
  double quadrature_tol; /* relative tolerance for projections */
} tsb_options;

typedef struct tsb_record {
  int k;
  double t;
  double e1, e2;
  int has_derivative_errors; /* zero on the last layer */
  double de1, de2;
  double q;
  double mon_du, mon_dv, mon_au, mon_lv;
} tsb_record;

typedef struct tsb_summary {
  int completed;
  int layers; /* index of the last layer computed */
  double max_e1, max_e2, max_de1, max_de2;
  double q0;
  double wall_seconds;
} tsb_summary;

typedef struct tsb_run tsb_run;
typedef struct tsb_study tsb_study;

TSB_API const char* tsb_version(void);
/* Message of the last failure on the calling thread; empty if none. */
TSB_API const char* tsb_last_error(void);

TSB_API tsb_status tsb_default_params(int test_id, tsb_params* out);
TSB_API void tsb_default_options(tsb_options* out);
TSB_API tsb_status tsb_validate_params(const tsb_params* params);

/* Runs a benchmark. On TSB_ERR_NUMERIC the handle is still created and holds
 * the layers computed before the failure. */
TSB_API tsb_status tsb_run_execute(int test_id, const tsb_params* params,
                                   const tsb_options* options, tsb_run** out);
TSB_API void tsb_run_destroy(tsb_run* run);

TSB_API tsb_status tsb_run_summary(const tsb_run* run, tsb_summary* out);
/* Empty string when the run completed. */
TSB_API const char* tsb_run_failure(const tsb_run* run);
TSB_API size_t tsb_run_warning_count(const tsb_run* run);
TSB_API const char* tsb_run_warning(const tsb_run* run, size_t index);

TSB_API size_t tsb_run_record_count(const tsb_run* run);
TSB_API tsb_status tsb_run_record(const tsb_run* run, size_t index, tsb_record* out);

/* Final-layer coefficients; which = 0 for u, 1 for v. */
TSB_API tsb_status tsb_run_coefficients(const tsb_run* run, int which, double* out,
                                        size_t capacity, size_t* written);
/* Number of stored trajectory layers (0 unless record_trajectory was set) and
 * the coefficients of one of them (layer index 0 is k = 1). */
TSB_API size_t tsb_run_trajectory_length(const tsb_run* run);
TSB_API tsb_status tsb_run_trajectory_layer(const tsb_run* run, size_t layer, int which,
                                            double* out, size_t capacity, size_t* written);

/* Serialised error records. *needed receives the size including the
 * terminating zero; pass capacity 0 to query it. */
TSB_API tsb_status tsb_run_errors_text(const tsb_run* run, tsb_format format, char* buffer,
                                       size_t capacity, size_t* needed);
/* Writes <stem>_errors.{csv,json} and <stem>_profile.csv into directory
 * (created if missing). The stem is returned through stem_buffer when given. */
TSB_API tsb_status tsb_run_write(const tsb_run* run, tsb_format format, const char* directory,
                                 char* stem_buffer, size_t stem_capacity);

typedef struct tsb_study_run {
  int steps, modes;
  double tau;
  double max_e1, max_e2, max_de1, max_de2;
  int completed;
} tsb_study_run;

typedef struct tsb_study_summary {
  int temporal; /* 1: tau-halving study, 0: N sweep */
  double median_e1, median_e2, median_de1, median_de2;
  double slope_e1, slope_e2; /* N sweep only */
} tsb_study_summary;

TSB_API tsb_status tsb_temporal_study(int test_id, const tsb_params* base, const int* steps,
                                      size_t count, int control_modes,
                                      const tsb_options* options, tsb_study** out);
TSB_API tsb_status tsb_spatial_study(int test_id, const tsb_params* base, const int* modes,
                                     size_t count, const tsb_options* options, tsb_study** out);
TSB_API void tsb_study_destroy(tsb_study* study);

TSB_API tsb_status tsb_study_summary_get(const tsb_study* study, tsb_study_summary* out);
TSB_API size_t tsb_study_run_count(const tsb_study* study);
TSB_API tsb_status tsb_study_run_get(const tsb_study* study, size_t index, tsb_study_run* out);
/* Pairwise orders between runs index and index + 1, in the order E1, E2, dE1, dE2. */
TSB_API tsb_status tsb_study_orders(const tsb_study* study, size_t index, double out[4]);
TSB_API size_t tsb_study_flag_count(const tsb_study* study);
TSB_API const char* tsb_study_flag(const tsb_study* study, size_t index);
TSB_API tsb_status tsb_study_csv(const tsb_study* study, char* buffer, size_t capacity,
                                 size_t* needed);
TSB_API tsb_status tsb_study_write(const tsb_study* study, const char* path);

/* Matrix realisation of the scheme on random operator triples. */
typedef struct tsb_abstract_config {
  int dimension;
  int triples;
  uint64_t seed;
  double final_time;
  double spectrum_min, spectrum_max; /* eigenvalue range of A */
  double subordination;              /* target b0 */
  double c_norm;                     /* spectral norm of C */
  tsb_params physics;                /* alpha..a2 used; length, steps, modes ignored */
} tsb_abstract_config;

TSB_API void tsb_default_abstract_config(tsb_abstract_config* out);

/* For each triple and each n in steps, the running maxima of the six monitors
 * ||du/tau||, ||dv/tau||, <Au,u>^1/2, <Lv,v>^1/2, ||Au||, <A du,du>^1/2/tau
 * are written to running_max[(triple * count + i) * 6 + q]; spread[triple * 6 + q]
 * receives (max - min) / max across the grid. Either output may be NULL. */
TSB_API tsb_status tsb_abstract_boundedness(const tsb_abstract_config* config, const int* steps,
                                            size_t count, const tsb_options* options,
                                            double* running_max, double* spread);

#ifdef __cplusplus
}
#endif

#endif /* TIMOSHENKO_H */
