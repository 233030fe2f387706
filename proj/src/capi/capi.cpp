#include "oemdec.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "core/calib.hpp"
#include "core/estimate.hpp"
#include "core/gp.hpp"
#include "core/math_util.hpp"
#include "core/synth.hpp"

using namespace oemdec;

struct oemdec_core_map {
  CoreMap map;
};
struct oemdec_kernel {
  CouplingKernel kernel;
};
struct oemdec_covariance {
  SpatialCovariance cov;
};
struct oemdec_result {
  EstimateResult est;
};

namespace {

thread_local std::string g_last_error;

oemdec_status fail(oemdec_status code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename Fn>
oemdec_status guarded(Fn&& fn) {
  try {
    fn();
    return OEMDEC_OK;
  } catch (const ParamError& e) {
    return fail(OEMDEC_ERR_PARAM, e.what());
  } catch (const NumericError& e) {
    return fail(OEMDEC_ERR_NUMERIC, e.what());
  } catch (const std::bad_alloc&) {
    return fail(OEMDEC_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(OEMDEC_ERR_INTERNAL, e.what());
  }
}

oemdec_status require(bool ok, const char* what) {
  return ok ? OEMDEC_OK : fail(OEMDEC_ERR_PARAM, what);
}

Eigen::Map<const Eigen::VectorXd> as_vector(const double* data, int n) {
  return {data, n};
}

ImageF as_image(const double* data, int width, int height) {
  ImageF img(width, height);
  std::memcpy(img.data.data(), data, sizeof(double) * img.data.size());
  return img;
}

GibbsConfig to_core(const oemdec_mcmc_config& c) {
  GibbsConfig g;
  g.n_mc = c.n_mc;
  g.n_bi = c.n_bi;
  g.rng_seed = c.rng_seed;
  g.x_sampler = c.use_exact_hmc ? XSampler::exact_hmc : XSampler::coordinate_gibbs;
  return g;
}

VbConfig to_core(const oemdec_vb_config& c) {
  VbConfig v;
  v.max_iters = c.max_iters;
  v.epsilon_scale = c.epsilon_scale;
  v.half_residual_factor = c.half_residual_factor != 0;
  v.degenerate_qx = c.degenerate_qx != 0;
  return v;
}

AdmmConfig to_core(const oemdec_admm_config& c) {
  AdmmConfig a;
  a.lambda = c.lambda_value;
  a.mu = c.mu;
  a.max_iters = c.max_iters;
  a.epsilon_scale = c.epsilon_scale;
  return a;
}

Hyperparams to_core(const oemdec_hyperparams& h) {
  return {h.alpha, h.alpha_o, h.beta_o, h.eta, h.nu};
}

}  // namespace

extern "C" {

const char* oemdec_version(void) { return "0.1.0"; }

const char* oemdec_last_error(void) { return g_last_error.c_str(); }

/* -------- core maps -------- */

oemdec_status oemdec_core_map_create(int width, int height, const double* xs,
                                     const double* ys, int n, oemdec_core_map** out) {
  if (auto s = require(xs && ys && out && n > 0, "null buffer or n <= 0")) return s;
  return guarded([&] {
    auto handle = std::make_unique<oemdec_core_map>();
    handle->map.width = width;
    handle->map.height = height;
    handle->map.positions.reserve(n);
    for (int i = 0; i < n; ++i) handle->map.positions.emplace_back(xs[i], ys[i]);
    handle->map.validate();
    *out = handle.release();
  });
}

oemdec_status oemdec_core_map_hex_lattice(int width, int height, double spacing,
                                          double margin, double jitter, uint64_t seed,
                                          oemdec_core_map** out) {
  if (auto s = require(out != nullptr, "null output handle")) return s;
  return guarded([&] {
    auto handle = std::make_unique<oemdec_core_map>();
    handle->map = hex_lattice(width, height, spacing, margin, jitter, seed);
    *out = handle.release();
  });
}

oemdec_status oemdec_core_map_detect(const double* image, int width, int height,
                                     double min_separation, double intensity_floor,
                                     oemdec_core_map** out) {
  if (auto s = require(image && out, "null buffer")) return s;
  return guarded([&] {
    auto handle = std::make_unique<oemdec_core_map>();
    handle->map = detect_cores(as_image(image, width, height), min_separation,
                               intensity_floor);
    *out = handle.release();
  });
}

int oemdec_core_map_count(const oemdec_core_map* map) { return map ? map->map.count() : 0; }
int oemdec_core_map_width(const oemdec_core_map* map) { return map ? map->map.width : 0; }
int oemdec_core_map_height(const oemdec_core_map* map) { return map ? map->map.height : 0; }

void oemdec_core_map_positions(const oemdec_core_map* map, double* xs, double* ys) {
  if (!map || !xs || !ys) return;
  for (int i = 0; i < map->map.count(); ++i) {
    xs[i] = map->map.positions[i].x();
    ys[i] = map->map.positions[i].y();
  }
}

void oemdec_core_map_free(oemdec_core_map* map) { delete map; }

/* -------- kernel -------- */

void oemdec_kernel_params_init(oemdec_kernel_params* params) {
  params->alpha_h = 4.0;
  params->beta_h = 0.8;
  params->truncation_radius = 20.0;
  params->row_normalize = 0;
}

void oemdec_kernel_params_gaussian(oemdec_kernel_params* params, double sigma2_h) {
  oemdec_kernel_params_init(params);
  params->alpha_h = std::sqrt(2.0 * sigma2_h);
  params->beta_h = 2.0;
}

oemdec_status oemdec_kernel_build(const oemdec_core_map* map,
                                  const oemdec_kernel_params* params, oemdec_kernel** out) {
  if (auto s = require(map && params && out, "null argument")) return s;
  return guarded([&] {
    KernelParams p;
    p.alpha_h = params->alpha_h;
    p.beta_h = params->beta_h;
    p.truncation_radius = params->truncation_radius;
    p.row_normalize = params->row_normalize != 0;
    auto handle = std::make_unique<oemdec_kernel>();
    handle->kernel = build_coupling_kernel(map->map, p);
    *out = handle.release();
  });
}

int oemdec_kernel_size(const oemdec_kernel* kernel) {
  return kernel ? kernel->kernel.size() : 0;
}

oemdec_status oemdec_kernel_apply(const oemdec_kernel* kernel, const double* x, int n,
                                  double* out) {
  if (auto s = require(kernel && x && out, "null argument")) return s;
  return guarded([&] {
    const Eigen::VectorXd result = forward_apply(kernel->kernel, as_vector(x, n));
    std::memcpy(out, result.data(), sizeof(double) * result.size());
  });
}

void oemdec_kernel_free(oemdec_kernel* kernel) { delete kernel; }

/* -------- covariance -------- */

oemdec_status oemdec_covariance_build(const oemdec_core_map* map, double length_scale,
                                      double exponent, double jitter,
                                      oemdec_covariance** out) {
  if (auto s = require(map && out, "null argument")) return s;
  return guarded([&] {
    auto handle = std::make_unique<oemdec_covariance>();
    handle->cov = build_covariance(map->map, {length_scale, exponent}, jitter);
    *out = handle.release();
  });
}

void oemdec_covariance_free(oemdec_covariance* cov) { delete cov; }

/* -------- configs -------- */

void oemdec_hyperparams_init(oemdec_hyperparams* hyper) {
  hyper->alpha = 10.0;
  hyper->alpha_o = 10.0;
  hyper->beta_o = 0.1;
  hyper->eta = 1e-3;
  hyper->nu = 1e-3;
}

void oemdec_mcmc_config_init(oemdec_mcmc_config* config) {
  config->n_mc = 1500;
  config->n_bi = 500;
  config->rng_seed = 0;
  config->use_exact_hmc = 0;
}

void oemdec_vb_config_init(oemdec_vb_config* config) {
  config->max_iters = 500;
  config->epsilon_scale = 1e-5;
  config->half_residual_factor = 1;
  config->degenerate_qx = 1;
}

void oemdec_admm_config_init(oemdec_admm_config* config) {
  config->lambda_value = 1.0;
  config->mu = 1.0;
  config->max_iters = 2000;
  config->epsilon_scale = 1e-5;
}

/* -------- solvers -------- */

oemdec_status oemdec_run_mcmc(const oemdec_kernel* kernel, const oemdec_covariance* cov,
                              const double* y, int n, const oemdec_hyperparams* hyper,
                              const oemdec_mcmc_config* config, oemdec_result** out) {
  if (auto s = require(kernel && cov && y && hyper && config && out, "null argument"))
    return s;
  return guarded([&] {
    auto handle = std::make_unique<oemdec_result>();
    handle->est = run_gibbs(as_vector(y, n), kernel->kernel, cov->cov, to_core(*hyper),
                            to_core(*config))
                      .first;
    *out = handle.release();
  });
}

oemdec_status oemdec_run_vb(const oemdec_kernel* kernel, const oemdec_covariance* cov,
                            const double* y, int n, const oemdec_hyperparams* hyper,
                            const oemdec_vb_config* config, oemdec_result** out) {
  if (auto s = require(kernel && cov && y && hyper && config && out, "null argument"))
    return s;
  return guarded([&] {
    auto handle = std::make_unique<oemdec_result>();
    handle->est = run_vb(as_vector(y, n), kernel->kernel, cov->cov, to_core(*hyper),
                         to_core(*config))
                      .first;
    *out = handle.release();
  });
}

oemdec_status oemdec_run_admm(const oemdec_kernel* kernel, const oemdec_covariance* cov,
                              const double* y, int n, const oemdec_admm_config* config,
                              oemdec_result** out) {
  if (auto s = require(kernel && cov && y && config && out, "null argument")) return s;
  return guarded([&] {
    auto handle = std::make_unique<oemdec_result>();
    handle->est = run_admm(as_vector(y, n), kernel->kernel, cov->cov, to_core(*config)).first;
    *out = handle.release();
  });
}

oemdec_status oemdec_default_lambda_grid(const oemdec_kernel* kernel,
                                         const oemdec_covariance* cov, double out[5]) {
  if (auto s = require(kernel && cov && out, "null argument")) return s;
  return guarded([&] {
    const auto grid = default_lambda_grid(kernel->kernel, cov->cov);
    for (int i = 0; i < 5; ++i) out[i] = grid[i];
  });
}

oemdec_status oemdec_run_admm_sweep(const oemdec_kernel* kernel,
                                    const oemdec_covariance* cov, const double* y, int n,
                                    const double* lambdas, int n_lambda,
                                    const double* x_true, const oemdec_admm_config* config,
                                    double* rmse_out, oemdec_result** out) {
  if (auto s = require(kernel && cov && y && config && out && lambdas && n_lambda > 0,
                       "null argument or empty grid"))
    return s;
  return guarded([&] {
    AdmmConfig c = to_core(*config);
    c.lambda_grid.assign(lambdas, lambdas + n_lambda);
    Eigen::VectorXd truth;
    if (x_true) truth = as_vector(x_true, n);
    const auto entries =
        lambda_sweep(as_vector(y, n), kernel->kernel, cov->cov, x_true ? &truth : nullptr, c);
    auto handle = std::make_unique<oemdec_result>();
    handle->est = entries.back().result;
    for (size_t i = 0; i < entries.size(); ++i) {
      if (rmse_out && entries[i].rmse) rmse_out[i] = *entries[i].rmse;
      if (entries[i].best) handle->est = entries[i].result;
    }
    *out = handle.release();
  });
}

/* -------- results -------- */

int oemdec_result_size(const oemdec_result* r) {
  return r ? static_cast<int>(r->est.x_hat.size()) : 0;
}
const double* oemdec_result_x(const oemdec_result* r) {
  return r ? r->est.x_hat.data() : nullptr;
}
static double nan_for_null(const oemdec_result* r, double v) {
  return r ? v : std::numeric_limits<double>::quiet_NaN();
}
double oemdec_result_sigma2(const oemdec_result* r) { return nan_for_null(r, r ? r->est.sigma2 : 0); }
double oemdec_result_gamma2(const oemdec_result* r) { return nan_for_null(r, r ? r->est.gamma2 : 0); }
double oemdec_result_beta(const oemdec_result* r) { return nan_for_null(r, r ? r->est.beta : 0); }
double oemdec_result_lambda(const oemdec_result* r) { return nan_for_null(r, r ? r->est.lambda : 0); }
int oemdec_result_iterations(const oemdec_result* r) { return r ? r->est.iterations : 0; }
int oemdec_result_converged(const oemdec_result* r) { return r && r->est.converged ? 1 : 0; }
double oemdec_result_wall_time(const oemdec_result* r) { return r ? r->est.wall_time_s : 0.0; }
const char* oemdec_result_method(const oemdec_result* r) {
  return r ? r->est.method.c_str() : "";
}
void oemdec_result_free(oemdec_result* r) { delete r; }

/* -------- GP interpolation -------- */

oemdec_status oemdec_gp_interpolate(const oemdec_core_map* map, const double* x_hat, int n,
                                    double gamma2, double length_scale, double exponent,
                                    double jitter, int out_width, int out_height,
                                    double* mean_out, double* variance_out) {
  if (auto s = require(map && x_hat && mean_out && variance_out, "null argument")) return s;
  return guarded([&] {
    GpConfig cfg;
    cfg.jitter = jitter;
    const InterpolatedImage img =
        gp_interpolate(map->map, as_vector(x_hat, n), gamma2, {length_scale, exponent},
                       out_width, out_height, cfg);
    std::memcpy(mean_out, img.mean.data(), sizeof(double) * img.mean.size());
    std::memcpy(variance_out, img.variance.data(), sizeof(double) * img.variance.size());
  });
}

oemdec_status oemdec_gp_interpolate_points(const oemdec_core_map* map, const double* x_hat,
                                           int n, double gamma2, double length_scale,
                                           double exponent, double jitter, const double* xs,
                                           const double* ys, int m, double* mean_out,
                                           double* variance_out) {
  if (auto s = require(map && x_hat && xs && ys && mean_out && variance_out && m > 0,
                       "null argument or empty target list"))
    return s;
  return guarded([&] {
    std::vector<Eigen::Vector2d> targets;
    targets.reserve(m);
    for (int i = 0; i < m; ++i) targets.emplace_back(xs[i], ys[i]);
    GpConfig cfg;
    cfg.jitter = jitter;
    const GpPointPrediction pred = gp_interpolate_points(
        map->map, as_vector(x_hat, n), gamma2, {length_scale, exponent}, targets, cfg);
    std::memcpy(mean_out, pred.mean.data(), sizeof(double) * m);
    std::memcpy(variance_out, pred.variance.data(), sizeof(double) * m);
  });
}

oemdec_status oemdec_confidence_half_width(const double* variance, int n, double level,
                                           double* out) {
  if (auto s = require(variance && out && n > 0, "null argument")) return s;
  return guarded([&] {
    const Eigen::VectorXd hw = confidence_half_width(as_vector(variance, n), level);
    std::memcpy(out, hw.data(), sizeof(double) * n);
  });
}

/* -------- synthetic data -------- */

void oemdec_sim_config_init(oemdec_sim_config* config) {
  config->sigma2_h = 10.0;
  config->sigma2_c = 2.0;
  config->sigma2_n = 0.0;
  config->rng_seed = 0;
  config->use_core_value = 0;
}

oemdec_status oemdec_subsample_reference(const double* image, int width, int height,
                                         const oemdec_core_map* map, double* x_out) {
  if (auto s = require(image && map && x_out, "null argument")) return s;
  return guarded([&] {
    const Eigen::VectorXd x = subsample_reference(as_image(image, width, height), map->map);
    std::memcpy(x_out, x.data(), sizeof(double) * x.size());
  });
}

oemdec_status oemdec_simulate(const double* reference, int width, int height,
                              const oemdec_core_map* map, const oemdec_sim_config* config,
                              double* g_out, double* y_out, double* x_true_out) {
  if (auto s = require(reference && map && config && g_out && y_out && x_true_out,
                       "null argument"))
    return s;
  return guarded([&] {
    SimConfig c;
    c.sigma2_h = config->sigma2_h;
    c.sigma2_c = config->sigma2_c;
    c.sigma2_n = config->sigma2_n;
    c.rng_seed = config->rng_seed;
    c.extraction = config->use_core_value ? Extraction::core_value : Extraction::core_max;
    const Eigen::VectorXd x_true =
        subsample_reference(as_image(reference, width, height), map->map);
    const SimOutput sim = simulate_system_image(x_true, map->map, c);
    std::memcpy(g_out, sim.g.data.data(), sizeof(double) * sim.g.data.size());
    std::memcpy(y_out, sim.y.data(), sizeof(double) * sim.y.size());
    std::memcpy(x_true_out, x_true.data(), sizeof(double) * x_true.size());
  });
}

oemdec_status oemdec_rmse(const double* a, const double* b, int n, double* out) {
  if (auto s = require(a && b && out, "null argument")) return s;
  return guarded([&] { *out = rmse(as_vector(a, n), as_vector(b, n)); });
}

oemdec_status oemdec_add_noise(const double* y, int n, double sigma2_n, uint64_t seed,
                               double* out) {
  if (auto s = require(y && out, "null argument")) return s;
  return guarded([&] {
    const Eigen::VectorXd noisy = add_noise(as_vector(y, n), sigma2_n, seed);
    std::memcpy(out, noisy.data(), sizeof(double) * n);
  });
}

oemdec_status oemdec_phantom_image(int width, int height, double* out) {
  if (auto s = require(out != nullptr, "null output")) return s;
  return guarded([&] {
    const ImageF img = phantom_image(width, height);
    std::memcpy(out, img.data.data(), sizeof(double) * img.data.size());
  });
}

/* -------- calibration fit -------- */

oemdec_status oemdec_fit_covariance(const oemdec_core_map* map, const double* fields,
                                    int n_fields, const double* ells, int n_ell,
                                    const double* kappas, int n_kappa, double jitter,
                                    double* ell_out, double* kappa_out) {
  if (auto s = require(map && fields && ells && kappas && ell_out && kappa_out &&
                           n_fields > 0 && n_ell > 0 && n_kappa > 0,
                       "null argument or empty grid"))
    return s;
  return guarded([&] {
    const int n = map->map.count();
    std::vector<Eigen::VectorXd> field_list;
    field_list.reserve(n_fields);
    for (int f = 0; f < n_fields; ++f)
      field_list.emplace_back(as_vector(fields + static_cast<size_t>(f) * n, n));
    FitGrid grid;
    grid.length_scales.assign(ells, ells + n_ell);
    grid.exponents.assign(kappas, kappas + n_kappa);
    const CovarianceParams fit = fit_covariance_params(map->map, field_list, grid, jitter);
    *ell_out = fit.length_scale;
    *kappa_out = fit.exponent;
  });
}

/* -------- sweep -------- */

oemdec_status oemdec_sweep(const double* reference, int width, int height,
                           const oemdec_core_map* map, const double* sigma2_h_sim, int n_sim,
                           const double* sigma2_n, int n_noise,
                           const double* sigma2_h_deconv, int n_deconv, int n_seeds,
                           uint64_t base_seed, double sigma2_c, double length_scale,
                           double exponent, double jitter, const char* method,
                           const oemdec_mcmc_config* mcmc, const oemdec_vb_config* vb,
                           const oemdec_admm_config* admm, int jobs,
                           oemdec_sweep_row** rows_out, int* n_rows_out) {
  if (auto s = require(reference && map && sigma2_h_sim && sigma2_n && method && rows_out &&
                           n_rows_out && n_sim > 0 && n_noise > 0,
                       "null argument or empty grid"))
    return s;
  return guarded([&] {
    SweepOptions opt;
    opt.sigma2_h_sim.assign(sigma2_h_sim, sigma2_h_sim + n_sim);
    opt.sigma2_n.assign(sigma2_n, sigma2_n + n_noise);
    if (sigma2_h_deconv && n_deconv > 0)
      opt.sigma2_h_deconv.assign(sigma2_h_deconv, sigma2_h_deconv + n_deconv);
    opt.n_seeds = n_seeds;
    opt.base_seed = base_seed;
    opt.sigma2_c = sigma2_c;
    opt.cov_params = {length_scale, exponent};
    opt.cov_jitter = jitter;
    opt.jobs = jobs;

    SolverSpec spec;
    spec.method = method_from_name(method);
    if (mcmc) spec.gibbs = to_core(*mcmc);
    if (vb) spec.vb = to_core(*vb);
    if (admm) spec.admm = to_core(*admm);

    const std::vector<SweepRow> rows =
        sweep_experiment(as_image(reference, width, height), map->map, opt, spec);
    auto* out = new oemdec_sweep_row[rows.size()];
    for (size_t i = 0; i < rows.size(); ++i) {
      out[i].sigma2_h_sim = rows[i].sigma2_h_sim;
      out[i].sigma2_h_deconv = rows[i].sigma2_h_deconv;
      out[i].sigma2_n = rows[i].sigma2_n;
      out[i].seed = rows[i].seed;
      out[i].rmse_before = rows[i].rmse_before;
      out[i].rmse_after = rows[i].rmse_after;
      out[i].wall_time_s = rows[i].wall_time_s;
      out[i].ok = rows[i].status == "ok" ? 1 : 0;
      std::snprintf(out[i].solver, sizeof(out[i].solver), "%s", rows[i].solver.c_str());
      std::snprintf(out[i].status, sizeof(out[i].status), "%s", rows[i].status.c_str());
    }
    *rows_out = out;
    *n_rows_out = static_cast<int>(rows.size());
  });
}

void oemdec_sweep_rows_free(oemdec_sweep_row* rows) { delete[] rows; }

}  // extern "C"
