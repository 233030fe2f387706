#pragma once

#include <vector>

#include "core/covariance.hpp"
#include "core/image.hpp"

namespace oemdec {

// Zero-mean GP interpolation of core intensities onto arbitrary targets.
// The prior covariance is Delta' = Delta/gamma2, so the predictive mean does
// not depend on gamma2 and the predictive variance is bounded by 1/gamma2.
struct InterpolatedImage {
  int width = 0;
  int height = 0;
  Eigen::VectorXd mean;      // row-major
  Eigen::VectorXd variance;  // row-major, clamped at 0
  CovarianceParams params;
  double gamma2 = 1.0;
  int clamped = 0;           // variance entries clipped up to 0 by round-off
};

struct GpConfig {
  double jitter = 0.0;  // numerical device only; the cores are noise-free data
  int tile = 8192;      // targets per batch; tiling never changes the values
};

InterpolatedImage gp_interpolate(const CoreMap& cores, const Eigen::VectorXd& x_hat,
                                 double gamma2, const CovarianceParams& params, int grid_w,
                                 int grid_h, const GpConfig& config = {});

struct GpPointPrediction {
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  int clamped = 0;
};

GpPointPrediction gp_interpolate_points(const CoreMap& cores, const Eigen::VectorXd& x_hat,
                                        double gamma2, const CovarianceParams& params,
                                        const std::vector<Eigen::Vector2d>& targets,
                                        const GpConfig& config = {});

// Per-pixel two-sided confidence half-width: q * sqrt(variance) with q the
// standard-normal quantile at (1+level)/2.
Eigen::VectorXd confidence_half_width(const Eigen::VectorXd& variance, double level);

}  // namespace oemdec
