/* oemdec — restoration of irregularly-sampled fiber-bundle images.
 *
 * C API over the C++ core: opaque handles, status codes, plain buffers.
 * Every function returning oemdec_status leaves a diagnostic message
 * retrievable through oemdec_last_error() on failure. All operations are
 * deterministic for fixed inputs and seeds.
 */
#ifndef OEMDEC_H
#define OEMDEC_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum oemdec_status {
  OEMDEC_OK = 0,
  OEMDEC_ERR_PARAM = 1,   /* invalid argument, dimension mismatch */
  OEMDEC_ERR_NUMERIC = 2, /* factorization failure or similar breakdown */
  OEMDEC_ERR_INTERNAL = 3
} oemdec_status;

const char* oemdec_version(void);
/* Thread-local message describing the most recent failure on this thread. */
const char* oemdec_last_error(void);

typedef struct oemdec_core_map oemdec_core_map;
typedef struct oemdec_kernel oemdec_kernel;
typedef struct oemdec_covariance oemdec_covariance;
typedef struct oemdec_result oemdec_result;

/* -------- core maps -------- */

oemdec_status oemdec_core_map_create(int width, int height, const double* xs,
                                     const double* ys, int n, oemdec_core_map** out);
oemdec_status oemdec_core_map_hex_lattice(int width, int height, double spacing,
                                          double margin, double jitter, uint64_t seed,
                                          oemdec_core_map** out);
/* Blob detection on a row-major grayscale image. */
oemdec_status oemdec_core_map_detect(const double* image, int width, int height,
                                     double min_separation, double intensity_floor,
                                     oemdec_core_map** out);
int oemdec_core_map_count(const oemdec_core_map* map);
int oemdec_core_map_width(const oemdec_core_map* map);
int oemdec_core_map_height(const oemdec_core_map* map);
/* xs and ys must each hold count doubles. */
void oemdec_core_map_positions(const oemdec_core_map* map, double* xs, double* ys);
void oemdec_core_map_free(oemdec_core_map* map);

/* -------- cross-coupling kernel -------- */

typedef struct oemdec_kernel_params {
  double alpha_h;           /* > 0, pixels */
  double beta_h;            /* > 0 */
  double truncation_radius; /* pixels; 0 disables truncation */
  int row_normalize;        /* 0 or 1 */
} oemdec_kernel_params;

/* Real-system defaults: alpha_h 4, beta_h 0.8, truncation 20 px, raw rows. */
void oemdec_kernel_params_init(oemdec_kernel_params* params);
/* Single-width Gaussian kernel: beta_h = 2, alpha_h = sqrt(2*sigma2_h). */
void oemdec_kernel_params_gaussian(oemdec_kernel_params* params, double sigma2_h);

oemdec_status oemdec_kernel_build(const oemdec_core_map* map,
                                  const oemdec_kernel_params* params,
                                  oemdec_kernel** out);
int oemdec_kernel_size(const oemdec_kernel* kernel);
/* out = H x (no noise); x and out hold kernel_size doubles. */
oemdec_status oemdec_kernel_apply(const oemdec_kernel* kernel, const double* x, int n,
                                  double* out);
void oemdec_kernel_free(oemdec_kernel* kernel);

/* -------- prior spatial covariance -------- */

oemdec_status oemdec_covariance_build(const oemdec_core_map* map, double length_scale,
                                      double exponent, double jitter,
                                      oemdec_covariance** out);
void oemdec_covariance_free(oemdec_covariance* cov);

/* -------- hierarchical-model hyper-parameters -------- */

typedef struct oemdec_hyperparams {
  double alpha;   /* IG shape on the noise variance, fixed */
  double alpha_o; /* Gamma shape on beta */
  double beta_o;  /* Gamma scale on beta */
  double eta;     /* IG shape on gamma^2 */
  double nu;      /* IG scale on gamma^2 */
} oemdec_hyperparams;

/* Defaults alpha 10, (alpha_o, beta_o) = (10, 0.1), (eta, nu) = (1e-3, 1e-3). */
void oemdec_hyperparams_init(oemdec_hyperparams* hyper);

/* -------- solvers -------- */

typedef struct oemdec_mcmc_config {
  int n_mc;          /* total Gibbs iterations, default 1500 */
  int n_bi;          /* burn-in, default 500 */
  uint64_t rng_seed;
  int use_exact_hmc; /* 0: coordinate Gibbs x-step (default), 1: exact HMC */
} oemdec_mcmc_config;
void oemdec_mcmc_config_init(oemdec_mcmc_config* config);

typedef struct oemdec_vb_config {
  int max_iters;            /* default 500 */
  double epsilon_scale;     /* stop at sqrt(N1)*epsilon_scale, default 1e-5 */
  int half_residual_factor; /* default 1 */
  int degenerate_qx;        /* default 1 */
} oemdec_vb_config;
void oemdec_vb_config_init(oemdec_vb_config* config);

typedef struct oemdec_admm_config {
  double lambda_value;  /* regularization sigma^2/gamma^2, >= 0 */
  double mu;            /* penalty, > 0, default 1 */
  int max_iters;        /* default 2000 */
  double epsilon_scale; /* default 1e-5 */
} oemdec_admm_config;
void oemdec_admm_config_init(oemdec_admm_config* config);

oemdec_status oemdec_run_mcmc(const oemdec_kernel* kernel, const oemdec_covariance* cov,
                              const double* y, int n, const oemdec_hyperparams* hyper,
                              const oemdec_mcmc_config* config, oemdec_result** out);
oemdec_status oemdec_run_vb(const oemdec_kernel* kernel, const oemdec_covariance* cov,
                            const double* y, int n, const oemdec_hyperparams* hyper,
                            const oemdec_vb_config* config, oemdec_result** out);
oemdec_status oemdec_run_admm(const oemdec_kernel* kernel, const oemdec_covariance* cov,
                              const double* y, int n, const oemdec_admm_config* config,
                              oemdec_result** out);

/* Five log-spaced lambdas spanning [1e-2,1e2]*trace(H'H)/trace(Delta^{-1}). */
oemdec_status oemdec_default_lambda_grid(const oemdec_kernel* kernel,
                                         const oemdec_covariance* cov, double out[5]);
/* Independent ADMM runs over the grid. When x_true is non-NULL the entry with
 * the lowest RMSE is returned and rmse_out (n_lambda doubles, optional)
 * reports the per-lambda errors; otherwise the last run is returned. */
oemdec_status oemdec_run_admm_sweep(const oemdec_kernel* kernel,
                                    const oemdec_covariance* cov, const double* y, int n,
                                    const double* lambdas, int n_lambda,
                                    const double* x_true, const oemdec_admm_config* config,
                                    double* rmse_out, oemdec_result** out);

/* -------- results -------- */

int oemdec_result_size(const oemdec_result* result);
const double* oemdec_result_x(const oemdec_result* result);
double oemdec_result_sigma2(const oemdec_result* result); /* NaN if not estimated */
double oemdec_result_gamma2(const oemdec_result* result); /* NaN if not estimated */
double oemdec_result_beta(const oemdec_result* result);   /* NaN if not estimated */
double oemdec_result_lambda(const oemdec_result* result); /* NaN unless ADMM */
int oemdec_result_iterations(const oemdec_result* result);
int oemdec_result_converged(const oemdec_result* result);
double oemdec_result_wall_time(const oemdec_result* result);
const char* oemdec_result_method(const oemdec_result* result);
void oemdec_result_free(oemdec_result* result);

/* -------- Gaussian-process interpolation -------- */

/* mean_out and variance_out are row-major out_width*out_height buffers.
 * variance is clamped at 0 and bounded by 1/gamma2. */
oemdec_status oemdec_gp_interpolate(const oemdec_core_map* map, const double* x_hat, int n,
                                    double gamma2, double length_scale, double exponent,
                                    double jitter, int out_width, int out_height,
                                    double* mean_out, double* variance_out);
oemdec_status oemdec_gp_interpolate_points(const oemdec_core_map* map, const double* x_hat,
                                           int n, double gamma2, double length_scale,
                                           double exponent, double jitter, const double* xs,
                                           const double* ys, int m, double* mean_out,
                                           double* variance_out);
/* half-width = q * sqrt(variance), q the normal quantile at (1+level)/2. */
oemdec_status oemdec_confidence_half_width(const double* variance, int n, double level,
                                           double* out);

/* -------- synthetic data -------- */

typedef struct oemdec_sim_config {
  double sigma2_h; /* coupling width (Gaussian kernel) */
  double sigma2_c; /* spatial blur variance, default 2 */
  double sigma2_n; /* pixel noise variance */
  uint64_t rng_seed;
  int use_core_value; /* 0: disk-max extraction (default), 1: core pixel value */
} oemdec_sim_config;
void oemdec_sim_config_init(oemdec_sim_config* config);

oemdec_status oemdec_subsample_reference(const double* image, int width, int height,
                                         const oemdec_core_map* map, double* x_out);
/* g_out: width*height of the map; y_out and x_true_out: map count doubles. */
oemdec_status oemdec_simulate(const double* reference, int width, int height,
                              const oemdec_core_map* map, const oemdec_sim_config* config,
                              double* g_out, double* y_out, double* x_true_out);
oemdec_status oemdec_rmse(const double* a, const double* b, int n, double* out);
oemdec_status oemdec_add_noise(const double* y, int n, double sigma2_n, uint64_t seed,
                               double* out);
oemdec_status oemdec_phantom_image(int width, int height, double* out);

/* -------- calibration fit -------- */

/* fields: n_fields rows of count-many intensities (row-major). Returns the
 * average of the per-field maximum-likelihood (ell, kappa) grid points. */
oemdec_status oemdec_fit_covariance(const oemdec_core_map* map, const double* fields,
                                    int n_fields, const double* ells, int n_ell,
                                    const double* kappas, int n_kappa, double jitter,
                                    double* ell_out, double* kappa_out);

/* -------- sweep protocol -------- */

typedef struct oemdec_sweep_row {
  double sigma2_h_sim;
  double sigma2_h_deconv;
  double sigma2_n;
  uint64_t seed;
  double rmse_before;
  double rmse_after;
  double wall_time_s;
  int ok;
  char solver[16];
  char status[112];
} oemdec_sweep_row;

/* Simulate + deconvolve per cell; sigma2_h_deconv NULL or empty means the
 * matched kernel. method is "mcmc", "vb" or "admm" (ADMM sweeps its default
 * lambda grid against the ground truth). Rows are in deterministic cell order
 * regardless of jobs. Free with oemdec_sweep_rows_free. */
oemdec_status oemdec_sweep(const double* reference, int width, int height,
                           const oemdec_core_map* map, const double* sigma2_h_sim, int n_sim,
                           const double* sigma2_n, int n_noise,
                           const double* sigma2_h_deconv, int n_deconv, int n_seeds,
                           uint64_t base_seed, double sigma2_c, double length_scale,
                           double exponent, double jitter, const char* method,
                           const oemdec_mcmc_config* mcmc, const oemdec_vb_config* vb,
                           const oemdec_admm_config* admm, int jobs,
                           oemdec_sweep_row** rows_out, int* n_rows_out);
void oemdec_sweep_rows_free(oemdec_sweep_row* rows);

#ifdef __cplusplus
}
#endif

#endif /* OEMDEC_H */
