#pragma once

#include <Eigen/Dense>

#include "core/core_map.hpp"

namespace oemdec {

// Prior spatial covariance parameters for exp(-(d/length_scale)^exponent).
// The kernel is a valid covariance only for 0 < exponent <= 2; calibration
// restricts its search to that range and the builder rejects values beyond it.
struct CovarianceParams {
  double length_scale = 6.0;
  double exponent = 1.0;

  void validate() const;
};

// Dense SPD covariance over the core positions, with the Cholesky factor and
// the inverse cached at build time. Immutable after construction.
struct SpatialCovariance {
  Eigen::MatrixXd matrix;      // Delta (+ jitter on the diagonal)
  Eigen::MatrixXd chol_lower;  // L with L L^T = matrix
  Eigen::MatrixXd inverse;     // Delta^{-1}
  CovarianceParams params;
  double jitter = 0.0;
  double log_det = 0.0;

  int size() const { return static_cast<int>(matrix.rows()); }

  // Solves Delta * out = rhs via the cached factor.
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

  // x^T Delta^{-1} x.
  double quad_inverse(const Eigen::VectorXd& x) const;
};

// Throws NumericError("covariance not PD; increase jitter or reduce length scale")
// when the factorization fails.
SpatialCovariance build_covariance(const CoreMap& cores, const CovarianceParams& params,
                                   double jitter = 1e-8);

}  // namespace oemdec
