#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/admm.hpp"
#include "core/image.hpp"
#include "core/mcmc.hpp"
#include "core/vb.hpp"

namespace oemdec {

enum class Extraction {
  core_max,   // maximum of g over a radius-ceil(sigma_c) disk around the core
  core_value  // value of g at the rounded core pixel
};

// Synthetic forward pipeline: couple core intensities with the Gaussian
// kernel of width sigma2_h, splat at core pixels, blur with a unit-peak
// Gaussian of variance sigma2_c, add pixel noise, extract per-core readings.
struct SimConfig {
  double sigma2_h = 10.0;
  double sigma2_c = 2.0;
  double sigma2_n = 0.0;
  uint64_t rng_seed = 0;
  Extraction extraction = Extraction::core_max;
  double kernel_truncation = 20.0;  // pixels, forwarded to the coupling kernel

  void validate() const;
};

// x_true[n] = image value at the rounded core position.
Eigen::VectorXd subsample_reference(const ImageF& image, const CoreMap& cores);

struct SimOutput {
  ImageF g;           // full synthetic system image
  Eigen::VectorXd y;  // per-core extracted observations
};

SimOutput simulate_system_image(const Eigen::VectorXd& x_true, const CoreMap& cores,
                                const SimConfig& config);

// sqrt(mean squared difference); throws ParamError on length mismatch.
double rmse(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat);

// Hexagonal core lattice with the given spacing, inset by margin on all
// sides. jitter > 0 displaces each core by a uniform offset in
// [-jitter, jitter]^2 (seeded, deterministic).
CoreMap hex_lattice(int width, int height, double spacing = 3.3, double margin = 5.0,
                    double jitter = 0.0, uint64_t seed = 0);

// Deterministic grayscale test scene in [0,255]; stands in for a licensed
// reference image.
ImageF phantom_image(int width, int height);

// Unit-peak Gaussian spots of the given amplitudes at the core positions;
// used to synthesize calibration backgrounds.
ImageF gaussian_spot_image(const CoreMap& cores, const Eigen::VectorXd& amplitudes,
                           double sigma2_c);

enum class Method { mcmc, vb, admm };

std::string method_name(Method m);
Method method_from_name(const std::string& name);  // throws ParamError on unknown

struct SolverSpec {
  Method method = Method::vb;
  GibbsConfig gibbs;
  VbConfig vb;
  AdmmConfig admm;
  // When true and x_true is available, ADMM sweeps its lambda grid and keeps
  // the lowest-RMSE run; otherwise admm.lambda is used as given.
  bool admm_pick_by_rmse = true;
};

struct SweepOptions {
  std::vector<double> sigma2_h_sim;
  std::vector<double> sigma2_n;
  std::vector<double> sigma2_h_deconv;  // empty -> matched kernel
  int n_seeds = 1;
  uint64_t base_seed = 0;
  double sigma2_c = 2.0;
  Extraction extraction = Extraction::core_max;
  double kernel_truncation = 20.0;
  CovarianceParams cov_params{6.0, 1.0};
  double cov_jitter = 1e-8;
  Hyperparams hyper;
  int jobs = 1;

  void validate() const;
};

struct SweepRow {
  double sigma2_h_sim = 0.0;
  double sigma2_h_deconv = 0.0;
  double sigma2_n = 0.0;
  uint64_t seed = 0;
  double rmse_before = 0.0;
  double rmse_after = 0.0;
  std::string solver;
  double wall_time_s = 0.0;
  std::string status;  // "ok" or the per-cell error message
};

// One row per (sigma2_h_sim, sigma2_h_deconv, sigma2_n, seed). Cells are
// independent jobs with seeds derived from base_seed and the cell indices;
// parallel execution (jobs > 1) reproduces the serial results.
std::vector<SweepRow> sweep_experiment(const ImageF& reference, const CoreMap& cores,
                                       const SweepOptions& options, const SolverSpec& solver);

}  // namespace oemdec
