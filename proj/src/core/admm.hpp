#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "core/estimate.hpp"
#include "core/model.hpp"

namespace oemdec {

// MAP solver for min 0.5*||Hx - y||^2 + (lambda/2) x' Delta^{-1} x  s.t. x >= 0,
// with lambda = sigma^2/gamma^2 fixed by the user (semi-supervised: nothing is
// estimated here).
struct AdmmConfig {
  double lambda = 1.0;  // regularization weight, >= 0
  double mu = 1.0;      // augmented-Lagrangian penalty, > 0
  int max_iters = 2000;
  double epsilon_scale = 1e-5;  // stop when ||u - x|| <= sqrt(N1)*epsilon_scale
  std::vector<double> lambda_grid;  // sweep mode; empty -> default_lambda_grid
  bool record_history = false;

  void validate() const;
};

struct AdmmState {
  Eigen::VectorXd x;
  Eigen::VectorXd u;   // u >= 0 after every update; returned as the estimate
  Eigen::VectorXd d1;  // scaled dual
  double primal_residual = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_history;  // objective at the u iterates
  std::vector<Eigen::VectorXd> x_history, u_history, d1_history;  // when recorded
};

// 0.5*||Hx-y||^2 + (lambda/2) x' Delta^{-1} x.
double admm_objective(const Eigen::VectorXd& y, const CouplingKernel& H,
                      const SpatialCovariance& Delta, double lambda,
                      const Eigen::VectorXd& x);

// u = max(x - d1, 0).
Eigen::VectorXd admm_u_update(const Eigen::VectorXd& x, const Eigen::VectorXd& d1);

// x = (H'H + lambda*Delta^{-1} + mu*I)^{-1} [H'y + mu(u + d1)], single exact solve.
Eigen::VectorXd admm_x_update(const Eigen::VectorXd& y, const CouplingKernel& H,
                              const SpatialCovariance& Delta, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& d1, const AdmmConfig& config);

std::pair<EstimateResult, AdmmState> run_admm(const Eigen::VectorXd& y,
                                              const CouplingKernel& H,
                                              const SpatialCovariance& Delta,
                                              const AdmmConfig& config);

// Five log-spaced lambdas spanning [1e-2, 1e2] * trace(H'H)/trace(Delta^{-1}).
std::vector<double> default_lambda_grid(const CouplingKernel& H,
                                        const SpatialCovariance& Delta);

struct LambdaSweepEntry {
  double lambda = 0.0;
  EstimateResult result;
  std::optional<double> rmse;  // vs x_true when supplied
  bool best = false;           // argmin-RMSE flag
};

// Independent run_admm per grid value; order-insensitive. When x_true is given
// each entry carries its RMSE and the argmin is flagged.
std::vector<LambdaSweepEntry> lambda_sweep(const Eigen::VectorXd& y, const CouplingKernel& H,
                                           const SpatialCovariance& Delta,
                                           const Eigen::VectorXd* x_true,
                                           const AdmmConfig& config);

}  // namespace oemdec
