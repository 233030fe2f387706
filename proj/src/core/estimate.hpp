#pragma once

#include <Eigen/Core>
#include <limits>
#include <string>

namespace oemdec {

// Restored intensities plus whatever scalar estimates the solver produces.
// Scalars the solver does not estimate are left as NaN.
struct EstimateResult {
  Eigen::VectorXd x_hat;
  double sigma2 = std::numeric_limits<double>::quiet_NaN();
  double gamma2 = std::numeric_limits<double>::quiet_NaN();
  double beta = std::numeric_limits<double>::quiet_NaN();
  double lambda = std::numeric_limits<double>::quiet_NaN();  // ADMM only
  int iterations = 0;
  bool converged = true;
  double wall_time_s = 0.0;
  std::string method;
};

}  // namespace oemdec
