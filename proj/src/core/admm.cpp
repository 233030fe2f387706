#include "core/admm.hpp"

#include <chrono>
#include <cmath>

#include "core/errors.hpp"
#include "core/precision.hpp"
#include "core/synth.hpp"

namespace oemdec {

void AdmmConfig::validate() const {
  if (!(lambda >= 0.0)) throw ParamError("lambda must be >= 0");
  if (!(mu > 0.0)) throw ParamError("mu must be > 0");
  if (max_iters < 1) throw ParamError("max_iters must be >= 1");
  if (!(epsilon_scale > 0.0)) throw ParamError("epsilon_scale must be > 0");
}

double admm_objective(const Eigen::VectorXd& y, const CouplingKernel& H,
                      const SpatialCovariance& Delta, double lambda,
                      const Eigen::VectorXd& x) {
  return 0.5 * (H.matrix * x - y).squaredNorm() + 0.5 * lambda * Delta.quad_inverse(x);
}

Eigen::VectorXd admm_u_update(const Eigen::VectorXd& x, const Eigen::VectorXd& d1) {
  return (x - d1).cwiseMax(0.0);
}

Eigen::VectorXd admm_x_update(const Eigen::VectorXd& y, const CouplingKernel& H,
                              const SpatialCovariance& Delta, const Eigen::VectorXd& u,
                              const Eigen::VectorXd& d1, const AdmmConfig& config) {
  config.validate();
  PrecisionOperator op(H, Delta);
  op.factor(1.0, config.lambda, config.mu);
  return op.factor_solve(op.ht_apply(y) + config.mu * (u + d1));
}

std::pair<EstimateResult, AdmmState> run_admm(const Eigen::VectorXd& y,
                                              const CouplingKernel& H,
                                              const SpatialCovariance& Delta,
                                              const AdmmConfig& config) {
  config.validate();
  if (y.size() != H.matrix.rows() || H.size() != Delta.size())
    throw ParamError("run_admm: dimension mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(y.size());
  const double epsilon = std::sqrt(static_cast<double>(n)) * config.epsilon_scale;

  // The x-step matrix is constant across iterations: factor it once.
  PrecisionOperator op(H, Delta);
  op.factor(1.0, config.lambda, config.mu);
  const Eigen::VectorXd hty = op.ht_apply(y);

  AdmmState st;
  st.x = y.cwiseMax(0.0);
  st.u = st.x;
  st.d1 = Eigen::VectorXd::Zero(n);

  for (int k = 0; k < config.max_iters; ++k) {
    st.u = (st.x - st.d1).cwiseMax(0.0);
    st.x = op.factor_solve(hty + config.mu * (st.u + st.d1));
    st.d1 -= st.x - st.u;

    st.iterations = k + 1;
    st.primal_residual = (st.u - st.x).norm();
    st.objective_history.push_back(admm_objective(y, H, Delta, config.lambda, st.u));
    if (config.record_history) {
      st.x_history.push_back(st.x);
      st.u_history.push_back(st.u);
      st.d1_history.push_back(st.d1);
    }
    if (st.primal_residual <= epsilon) {
      st.converged = true;
      break;
    }
  }

  EstimateResult est;
  est.method = "admm";
  est.x_hat = st.u;  // the feasible iterate
  est.lambda = config.lambda;
  est.iterations = st.iterations;
  est.converged = st.converged;
  est.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {est, st};
}

std::vector<double> default_lambda_grid(const CouplingKernel& H,
                                        const SpatialCovariance& Delta) {
  // trace(H'H) is the squared Frobenius norm of H.
  const double scale = H.matrix.squaredNorm() / Delta.inverse.trace();
  std::vector<double> grid;
  for (int k = 0; k < 5; ++k) grid.push_back(scale * std::pow(10.0, -2.0 + k));
  return grid;
}

std::vector<LambdaSweepEntry> lambda_sweep(const Eigen::VectorXd& y, const CouplingKernel& H,
                                           const SpatialCovariance& Delta,
                                           const Eigen::VectorXd* x_true,
                                           const AdmmConfig& config) {
  std::vector<double> grid =
      config.lambda_grid.empty() ? default_lambda_grid(H, Delta) : config.lambda_grid;
  if (grid.empty()) throw ParamError("lambda grid must not be empty");

  std::vector<LambdaSweepEntry> out;
  out.reserve(grid.size());
  for (double lam : grid) {
    AdmmConfig c = config;
    c.lambda = lam;
    LambdaSweepEntry e;
    e.lambda = lam;
    e.result = run_admm(y, H, Delta, c).first;
    if (x_true) e.rmse = rmse(*x_true, e.result.x_hat);
    out.push_back(std::move(e));
  }
  if (x_true) {
    size_t best = 0;
    for (size_t i = 1; i < out.size(); ++i)
      if (*out[i].rmse < *out[best].rmse) best = i;
    out[best].best = true;
  }
  return out;
}

}  // namespace oemdec
