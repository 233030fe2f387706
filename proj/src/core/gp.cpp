#include "core/gp.hpp"

#include <cmath>
#include <cstdio>

#include "core/errors.hpp"
#include "core/math_util.hpp"

namespace oemdec {

namespace {

struct GpSolve {
  Eigen::MatrixXd chol_lower;  // L of Delta(z,z) (+ jitter)
  Eigen::VectorXd weights;     // Delta(z,z)^{-1} x_hat, computed once
};

GpSolve prepare(const CoreMap& cores, const Eigen::VectorXd& x_hat, double gamma2,
                const CovarianceParams& params, double jitter) {
  params.validate();
  cores.validate();
  if (!(gamma2 > 0.0)) throw ParamError("gamma2 must be > 0");
  if (x_hat.size() != cores.count()) throw ParamError("x_hat length != core count");
  const SpatialCovariance cov = build_covariance(cores, params, jitter);
  GpSolve s;
  s.chol_lower = cov.chol_lower;
  s.weights = cov.solve(x_hat);
  return s;
}

// Predict one batch of targets. The gamma2 factors cancel in the mean; the
// variance is (1 - k' Delta^{-1} k)/gamma2, clamped at zero.
void predict(const CoreMap& cores, const CovarianceParams& params, const GpSolve& s,
             double gamma2, const Eigen::Vector2d* targets, int count, double* mean_out,
             double* var_out, int& clamped, double& worst_negative) {
  const int n = cores.count();
  Eigen::MatrixXd k(n, count);
  for (int t = 0; t < count; ++t)
    for (int i = 0; i < n; ++i)
      k(i, t) = std::exp(
          -std::pow(distance(cores.positions[i], targets[t]) / params.length_scale,
                    params.exponent));
  for (int t = 0; t < count; ++t) mean_out[t] = k.col(t).dot(s.weights);
  // v = L^{-1} k, variance = (1 - ||v||^2)/gamma2.
  s.chol_lower.triangularView<Eigen::Lower>().solveInPlace(k);
  for (int t = 0; t < count; ++t) {
    double v = (1.0 - k.col(t).squaredNorm()) / gamma2;
    if (v < 0.0) {
      ++clamped;
      worst_negative = std::min(worst_negative, v);
      v = 0.0;
    }
    var_out[t] = v;
  }
}

void warn_clamping(int clamped, double worst_negative, double gamma2) {
  if (clamped > 0 && -worst_negative > 1e-8 / gamma2)
    std::fprintf(stderr,
                 "oemdec: gp variance clamped at 0 for %d target(s), worst %.3e\n",
                 clamped, worst_negative);
}

}  // namespace

InterpolatedImage gp_interpolate(const CoreMap& cores, const Eigen::VectorXd& x_hat,
                                 double gamma2, const CovarianceParams& params, int grid_w,
                                 int grid_h, const GpConfig& config) {
  if (grid_w <= 0 || grid_h <= 0) throw ParamError("grid dimensions must be positive");
  const GpSolve s = prepare(cores, x_hat, gamma2, params, config.jitter);

  InterpolatedImage out;
  out.width = grid_w;
  out.height = grid_h;
  out.params = params;
  out.gamma2 = gamma2;
  const Eigen::Index total = static_cast<Eigen::Index>(grid_w) * grid_h;
  out.mean.resize(total);
  out.variance.resize(total);

  const int tile = std::max(1, config.tile);
  std::vector<Eigen::Vector2d> batch;
  batch.reserve(tile);
  double worst = 0.0;
  Eigen::Index base = 0;
  for (Eigen::Index idx = 0; idx < total;) {
    batch.clear();
    base = idx;
    while (idx < total && static_cast<int>(batch.size()) < tile) {
      batch.emplace_back(static_cast<double>(idx % grid_w), static_cast<double>(idx / grid_w));
      ++idx;
    }
    predict(cores, params, s, gamma2, batch.data(), static_cast<int>(batch.size()),
            out.mean.data() + base, out.variance.data() + base, out.clamped, worst);
  }
  warn_clamping(out.clamped, worst, gamma2);
  return out;
}

GpPointPrediction gp_interpolate_points(const CoreMap& cores, const Eigen::VectorXd& x_hat,
                                        double gamma2, const CovarianceParams& params,
                                        const std::vector<Eigen::Vector2d>& targets,
                                        const GpConfig& config) {
  const GpSolve s = prepare(cores, x_hat, gamma2, params, config.jitter);
  GpPointPrediction out;
  out.mean.resize(targets.size());
  out.variance.resize(targets.size());
  const int tile = std::max(1, config.tile);
  double worst = 0.0;
  for (size_t base = 0; base < targets.size(); base += tile) {
    const int count = static_cast<int>(std::min<size_t>(tile, targets.size() - base));
    predict(cores, params, s, gamma2, targets.data() + base, count, out.mean.data() + base,
            out.variance.data() + base, out.clamped, worst);
  }
  warn_clamping(out.clamped, worst, gamma2);
  return out;
}

Eigen::VectorXd confidence_half_width(const Eigen::VectorXd& variance, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ParamError("confidence level must lie in (0,1)");
  const double q = normal_quantile(0.5 * (1.0 + level));
  return q * variance.array().sqrt();
}

}  // namespace oemdec
