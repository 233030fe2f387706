#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "core/estimate.hpp"
#include "core/model.hpp"

namespace oemdec {

struct VbInit {
  double e_sigma2 = 1.0;
  double e_gamma2 = 1.0;
  double e_beta = 1.0;
};

struct VbConfig {
  int max_iters = 500;
  double epsilon_scale = 1e-5;  // stopping threshold is sqrt(N1) * epsilon_scale
  // The exact sigma2 conditional carries a 1/2 on the residual; the published
  // update drops it. Default keeps the 1/2, the flag reproduces the literal form.
  bool half_residual_factor = true;
  bool degenerate_qx = true;  // point-mass q(x): no covariance bookkeeping
  std::optional<VbInit> init;

  void validate() const;
};

struct VbState {
  Eigen::VectorXd e_x;
  std::optional<Eigen::MatrixXd> cov_x;  // only in non-degenerate mode
  double e_sigma2 = 1.0;
  double e_gamma2 = 1.0;
  double e_beta = 1.0;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
  std::vector<double> residual_history;
};

// Mean-field coordinate updates. vb_update_x refreshes e_x (and cov_x unless
// degenerate); the scalar updates return the new expectation.
void vb_update_x(const Eigen::VectorXd& y, const CouplingKernel& H,
                 const SpatialCovariance& Delta, VbState& state, bool degenerate);
double vb_update_sigma2(const Eigen::VectorXd& y, const CouplingKernel& H,
                        const VbState& state, const Hyperparams& hyper,
                        bool half_residual_factor);
double vb_update_gamma2(const SpatialCovariance& Delta, const VbState& state,
                        const Hyperparams& hyper);
double vb_update_beta(const VbState& state, const Hyperparams& hyper);

// Cycles x -> sigma2 -> gamma2 -> beta until the summed change of the four
// tracked quantities drops below sqrt(N1)*epsilon_scale or max_iters is hit
// (then the result is flagged, not an error). The x update is solved directly;
// positivity is not enforced.
std::pair<EstimateResult, VbState> run_vb(const Eigen::VectorXd& y, const CouplingKernel& H,
                                          const SpatialCovariance& Delta,
                                          const Hyperparams& hyper, const VbConfig& config);

}  // namespace oemdec
