/* C interface to the point-tomography library.
 *
 * Objects are opaque handles created by ptomo_*_create/load functions and
 * released with the matching *_free. Every fallible call returns a
 * ptomo_status; on failure ptomo_last_error() describes the most recent
 * error on the calling thread.
 *
 * Complex arrays are interleaved (re, im) doubles in row-major order.
 */
#ifndef PTOMO_H_
#define PTOMO_H_

#include <stddef.h>
#include <stdint.h>

#if defined(PTOMO_BUILDING_LIBRARY)
#define PTOMO_API __attribute__((visibility("default")))
#else
#define PTOMO_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ptomo_status {
  PTOMO_OK = 0,
  PTOMO_ERR_INVALID_INPUT = 1,
  PTOMO_ERR_DEGENERATE_INPUT = 2,
  PTOMO_ERR_NUMERICAL = 3,
  PTOMO_ERR_INTERNAL = 4,
  PTOMO_ERR_IO = 5,
  PTOMO_ERR_NULL_ARGUMENT = 6,
  PTOMO_ERR_BUFFER_TOO_SMALL = 7
} ptomo_status;

typedef enum ptomo_norm_kind { PTOMO_NORM_SPECTRAL = 0, PTOMO_NORM_FROBENIUS = 1 } ptomo_norm_kind;

typedef enum ptomo_haar_convention {
  PTOMO_HAAR_PHASE_FIXED = 0,
  PTOMO_HAAR_RAW_COEFFICIENTS = 1
} ptomo_haar_convention;

typedef struct ptomo_device ptomo_device;
typedef struct ptomo_povm ptomo_povm;
typedef struct ptomo_sweep ptomo_sweep;

PTOMO_API const char* ptomo_version(void);
PTOMO_API const char* ptomo_last_error(void);
PTOMO_API const char* ptomo_status_string(ptomo_status status);

/* ---- devices -------------------------------------------------------- */

PTOMO_API ptomo_status ptomo_device_from_matrix(const double* re_im, size_t ports, int reunitarize,
                                                ptomo_device** out);
PTOMO_API ptomo_status ptomo_device_load_file(const char* path, int reunitarize, ptomo_device** out);
/* name: "u7" */
PTOMO_API ptomo_status ptomo_device_load_builtin(const char* name, int reunitarize, ptomo_device** out);
PTOMO_API void ptomo_device_free(ptomo_device* device);
PTOMO_API size_t ptomo_device_ports(const ptomo_device* device);
PTOMO_API double ptomo_device_raw_unitarity_deviation(const ptomo_device* device);
PTOMO_API double ptomo_device_unitarity_deviation(const ptomo_device* device);
PTOMO_API double ptomo_device_replacement_distance(const ptomo_device* device);

/* ---- families and phase design ---------------------------------------- */

/* Writes up to `capacity` subsets (each `dim` 1-based ints) into `out`;
 * `count` receives the total number. Pass out = NULL to query the count. */
PTOMO_API ptomo_status ptomo_enumerate_families(size_t ports, size_t dim, int* out, size_t capacity,
                                                size_t* count);

typedef struct ptomo_phase_options {
  int starts;
  int max_iterations;
  double diameter_tolerance;
  uint64_t seed;
  ptomo_norm_kind norm;
} ptomo_phase_options;

PTOMO_API void ptomo_phase_options_default(ptomo_phase_options* options);

/* phases_out receives dim phases (phases_out[0] = 0). */
PTOMO_API ptomo_status ptomo_optimize_phases(const ptomo_device* device, const int* subset, size_t dim,
                                             const ptomo_phase_options* options, double* phases_out,
                                             double* norm_out, double* zero_phase_norm_out);

PTOMO_API ptomo_status ptomo_haar_mean_c_norm(size_t dim, size_t outcomes, size_t samples, uint64_t seed,
                                              ptomo_norm_kind norm, ptomo_haar_convention convention,
                                              double* mean, double* standard_error);

/* ---- POVMs ---------------------------------------------------------------- */

/* phases may be NULL (all zero). completeness_warning may be NULL. */
PTOMO_API ptomo_status ptomo_povm_from_family(const ptomo_device* device, const int* subset, size_t dim,
                                              const double* phases, ptomo_povm** out,
                                              int* completeness_warning);
/* re_im holds outcomes x dim coefficients, row eta = a^eta. */
PTOMO_API ptomo_status ptomo_povm_from_coefficients(const double* re_im, size_t outcomes, size_t dim,
                                                    ptomo_povm** out);
PTOMO_API ptomo_status ptomo_povm_basis(size_t dim, ptomo_povm** out);
PTOMO_API ptomo_status ptomo_povm_haar(size_t dim, size_t outcomes, uint64_t seed, ptomo_povm** out);
PTOMO_API void ptomo_povm_free(ptomo_povm* povm);
PTOMO_API size_t ptomo_povm_dim(const ptomo_povm* povm);
PTOMO_API size_t ptomo_povm_outcomes(const ptomo_povm* povm);
PTOMO_API double ptomo_povm_completeness_deviation(const ptomo_povm* povm);
/* re_im receives outcomes x dim complex values. */
PTOMO_API ptomo_status ptomo_povm_coefficients(const ptomo_povm* povm, double* re_im, size_t capacity_doubles);

/* ---- Fisher information ------------------------------------------------- */

/* (d-1)x(d-1) complex blocks, each 2 (d-1)^2 doubles. */
PTOMO_API ptomo_status ptomo_c_matrix(const ptomo_povm* povm, double* re_im);
PTOMO_API ptomo_status ptomo_c_norm(const ptomo_povm* povm, ptomo_norm_kind norm, double* out);
PTOMO_API ptomo_status ptomo_cfim_first_order(const ptomo_povm* povm, double* hermitian_block,
                                              double* symmetric_block);
/* theta: d-1 complex values. */
PTOMO_API ptomo_status ptomo_cfim_numeric(const ptomo_povm* povm, const double* theta, double step,
                                          double* hermitian_block, double* symmetric_block);
PTOMO_API ptomo_status ptomo_qfim_pure(const double* theta, size_t dim, double* hermitian_block,
                                       double* symmetric_block);
/* tr(I-hat J-hat^{-1}) for the POVM at theta (NULL = fiducial). numeric != 0
 * uses finite-difference CFIM, otherwise the first-order form (theta must be
 * NULL). */
PTOMO_API ptomo_status ptomo_gm_inequality_lhs(const ptomo_povm* povm, const double* theta, int numeric,
                                               double* out);
PTOMO_API double ptomo_gill_massar_wmse(size_t dim, uint64_t n_exp);

/* ---- states --------------------------------------------------------------- */

/* Amplitudes of (|0> + sqrt(theta) sum_j |j>) / norm; amps: 2*dim doubles. */
PTOMO_API ptomo_status ptomo_equal_shift_state(double theta, size_t dim, double* amps);

/* ---- estimation ----------------------------------------------------------- */

typedef struct ptomo_mle_options {
  int max_iterations;
  double tolerance;
  int starts;
  double start_radius;
  uint64_t seed;
  double tie_statistic; /* likelihood-ratio resolution for tied maxima */
} ptomo_mle_options;

PTOMO_API void ptomo_mle_options_default(ptomo_mle_options* options);

/* counts: outcomes doubles (fractional allowed). theta_out: d-1 complex,
 * state_out: d complex; either may be NULL. */
PTOMO_API ptomo_status ptomo_estimate_state(const ptomo_povm* povm, const double* counts, size_t outcomes,
                                            const ptomo_mle_options* options, double* theta_out,
                                            double* state_out, double* log_likelihood_out);

typedef struct ptomo_bootstrap_summary {
  double point_infidelity;
  double low;
  double q25;
  double median;
  double q75;
  double high;
  int replicas;
  int degenerate;
} ptomo_bootstrap_summary;

/* Reference state is depolarize(equal_shift_state(theta, d), lambda). */
PTOMO_API ptomo_status ptomo_bootstrap(const ptomo_povm* povm, const int64_t* counts, size_t outcomes,
                                       double theta, double lambda, int n_boot, uint64_t seed,
                                       const ptomo_mle_options* options, ptomo_bootstrap_summary* out);

typedef struct ptomo_fit {
  double coefficient;
  double exponent;
  double residual;
  int excluded_zero_points;
} ptomo_fit;

PTOMO_API ptomo_status ptomo_fit_power_law(const double* n, const double* infidelity, size_t len,
                                           ptomo_fit* out);

/* ---- sweeps --------------------------------------------------------------- */

typedef struct ptomo_sweep_config {
  double theta;
  const int64_t* n_grid;
  size_t n_grid_len;
  int repetitions;
  double lambda;
  double systematic_epsilon;
  uint64_t noise_seed;
  int bootstrap_replicas;
  uint64_t seed;
  int workers;
  const char* povm_label; /* may be NULL */
  ptomo_mle_options mle;
} ptomo_sweep_config;

PTOMO_API void ptomo_sweep_config_default(ptomo_sweep_config* config);

typedef struct ptomo_sweep_row {
  int64_t n;
  int trial;
  double infidelity;
  double boot_low;
  double boot_q25;
  double boot_median;
  double boot_q75;
  double boot_high;
  int boot_degenerate;
} ptomo_sweep_row;

typedef struct ptomo_sweep_stats {
  int64_t n;
  double mean;
  double standard_error;
  int trials;
} ptomo_sweep_stats;

/* A sweep that aborts on a trial error returns PTOMO_ERR_* with *out still
 * set to the partial result (ptomo_sweep_aborted() != 0). */
PTOMO_API ptomo_status ptomo_run_sweep(const ptomo_povm* povm, const ptomo_sweep_config* config,
                                       ptomo_sweep** out);
PTOMO_API void ptomo_sweep_free(ptomo_sweep* sweep);
PTOMO_API size_t ptomo_sweep_row_count(const ptomo_sweep* sweep);
PTOMO_API ptomo_status ptomo_sweep_get_row(const ptomo_sweep* sweep, size_t index, ptomo_sweep_row* row);
PTOMO_API size_t ptomo_sweep_stats_count(const ptomo_sweep* sweep);
PTOMO_API ptomo_status ptomo_sweep_get_stats(const ptomo_sweep* sweep, size_t index, ptomo_sweep_stats* stats);
PTOMO_API int ptomo_sweep_aborted(const ptomo_sweep* sweep);
/* 16 hex digits plus terminator. */
PTOMO_API const char* ptomo_sweep_config_hash(const ptomo_sweep* sweep);

/* 1 - fidelity of the infinite-ensemble estimate for the sweep's true state
 * (theta, lambda) measured with `povm`. */
PTOMO_API ptomo_status ptomo_asymptotic_infidelity(const ptomo_povm* povm, double theta, double lambda,
                                                   const ptomo_mle_options* options, double* out);

/* ---- utilities ------------------------------------------------------------ */

/* First 16 hex digits of SHA-256(text); out must hold 17 bytes. */
PTOMO_API ptomo_status ptomo_config_hash(const char* text, char* out);
PTOMO_API ptomo_status ptomo_data_dir(char* out, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif /* PTOMO_H_ */
