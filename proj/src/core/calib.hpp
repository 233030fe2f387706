#pragma once

#include <vector>

#include "core/covariance.hpp"
#include "core/image.hpp"

namespace oemdec {

// Detects core centers in a background image: threshold at
// intensity_floor * max, 8-connected component labeling, intensity-weighted
// centroid per component, then greedy suppression of centroids closer than
// min_separation (brighter component wins). Deterministic.
CoreMap detect_cores(const ImageF& image, double min_separation, double intensity_floor);

struct FitGrid {
  std::vector<double> length_scales;
  std::vector<double> exponents;

  static FitGrid defaults();  // ell 1..20 step 1, kappa 0.25..2.0 step 0.25
  void validate() const;
};

// Zero-mean Gaussian log-density of the field under gamma2*Delta(ell,kappa)
// with gamma2 profiled out in closed form (gamma2_hat = x'Delta^{-1}x / N1).
double covariance_fit_objective(const CoreMap& cores, const Eigen::VectorXd& field,
                                const CovarianceParams& params, double jitter = 1e-8);

// Grid-search ML fit of (ell, kappa). Each training field is fitted on its
// own and the per-field argmax parameters are averaged. Ties break toward the
// lexicographically smallest (ell, kappa).
CovarianceParams fit_covariance_params(const CoreMap& cores,
                                       const std::vector<Eigen::VectorXd>& fields,
                                       const FitGrid& grid = FitGrid::defaults(),
                                       double jitter = 1e-8);

}  // namespace oemdec
