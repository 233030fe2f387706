#include "core/vb.hpp"

#include <chrono>
#include <cmath>

#include "core/errors.hpp"
#include "core/precision.hpp"

namespace oemdec {

void VbConfig::validate() const {
  if (max_iters < 1) throw ParamError("max_iters must be >= 1");
  if (!(epsilon_scale > 0.0)) throw ParamError("epsilon_scale must be > 0");
  if (init && !(init->e_sigma2 > 0.0 && init->e_gamma2 > 0.0 && init->e_beta > 0.0))
    throw ParamError("VB init moments must be > 0");
}

void vb_update_x(const Eigen::VectorXd& y, const CouplingKernel& H,
                 const SpatialCovariance& Delta, VbState& state, bool degenerate) {
  if (!(state.e_sigma2 > 0.0 && state.e_gamma2 > 0.0))
    throw ParamError("vb_update_x: scalar moments must be > 0");
  const Eigen::VectorXd rhs = H.matrix.transpose() * y / state.e_sigma2;
  Eigen::MatrixXd prec = Eigen::MatrixXd(H.matrix.transpose() * H.matrix) / state.e_sigma2 +
                         Delta.inverse / state.e_gamma2;
  Eigen::LLT<Eigen::MatrixXd> llt(prec);
  if (llt.info() != Eigen::Success)
    throw NumericError("VB x-update system is singular; increase covariance jitter");
  if (degenerate) {
    // Direct solve of the normal equations; the covariance is never formed.
    state.e_x = llt.solve(rhs);
    state.cov_x.reset();
  } else {
    const int n = static_cast<int>(y.size());
    state.cov_x = llt.solve(Eigen::MatrixXd::Identity(n, n));
    state.e_x = (*state.cov_x).transpose() * rhs;
  }
}

double vb_update_sigma2(const Eigen::VectorXd& y, const CouplingKernel& H,
                        const VbState& state, const Hyperparams& hyper,
                        bool half_residual_factor) {
  const double n = static_cast<double>(y.size());
  double r = (y - H.matrix * state.e_x).squaredNorm();
  if (state.cov_x)
    r += (Eigen::MatrixXd(H.matrix.transpose() * H.matrix) * (*state.cov_x)).trace();
  const double c = half_residual_factor ? 0.5 : 1.0;
  return (state.e_beta + c * r) / (0.5 * n + hyper.alpha - 1.0);
}

double vb_update_gamma2(const SpatialCovariance& Delta, const VbState& state,
                        const Hyperparams& hyper) {
  const double n = static_cast<double>(state.e_x.size());
  double q = Delta.quad_inverse(state.e_x);
  if (state.cov_x) q += (Delta.inverse * (*state.cov_x)).trace();
  return (hyper.nu + 0.5 * q) / (0.5 * n + hyper.eta - 1.0);
}

double vb_update_beta(const VbState& state, const Hyperparams& hyper) {
  if (!(state.e_sigma2 > 0.0)) throw ParamError("vb_update_beta: e_sigma2 must be > 0");
  return (hyper.alpha + hyper.alpha_o) * hyper.beta_o * state.e_sigma2 /
         (hyper.beta_o + state.e_sigma2);
}

std::pair<EstimateResult, VbState> run_vb(const Eigen::VectorXd& y, const CouplingKernel& H,
                                          const SpatialCovariance& Delta,
                                          const Hyperparams& hyper, const VbConfig& config) {
  config.validate();
  hyper.validate();
  if (y.size() != H.matrix.rows() || H.size() != Delta.size())
    throw ParamError("run_vb: dimension mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(y.size());
  const double epsilon = std::sqrt(static_cast<double>(n)) * config.epsilon_scale;

  VbState state;
  if (config.init) {
    state.e_sigma2 = config.init->e_sigma2;
    state.e_gamma2 = config.init->e_gamma2;
    state.e_beta = config.init->e_beta;
  } else {
    const InitState ini = default_init(y, H, hyper);
    state.e_sigma2 = ini.sigma2;
    state.e_gamma2 = ini.gamma2;
    state.e_beta = ini.beta;
  }
  state.e_x = Eigen::VectorXd::Zero(n);

  PrecisionOperator op(H, Delta);
  const Eigen::VectorXd hty = op.ht_apply(y);
  Eigen::MatrixXd hth_dense;  // only materialized in full-covariance mode
  if (!config.degenerate_qx) hth_dense = Eigen::MatrixXd(op.hth());

  for (int k = 0; k < config.max_iters; ++k) {
    const Eigen::VectorXd x_prev = state.e_x;
    const double s_prev = state.e_sigma2, g_prev = state.e_gamma2, b_prev = state.e_beta;

    const double a = 1.0 / state.e_sigma2, b = 1.0 / state.e_gamma2;
    if (config.degenerate_qx) {
      state.e_x = op.solve(a, b, 0.0, hty * a);
    } else {
      op.factor(a, b, 0.0);
      state.cov_x = op.factor_solve_matrix();
      state.e_x = (*state.cov_x).transpose() * (hty * a);
    }

    double r = (y - H.matrix * state.e_x).squaredNorm();
    if (state.cov_x) r += (hth_dense * (*state.cov_x)).trace();
    const double c = config.half_residual_factor ? 0.5 : 1.0;
    state.e_sigma2 = (state.e_beta + c * r) / (0.5 * n + hyper.alpha - 1.0);

    double quad = Delta.quad_inverse(state.e_x);
    if (state.cov_x) quad += (Delta.inverse * (*state.cov_x)).trace();
    state.e_gamma2 = (hyper.nu + 0.5 * quad) / (0.5 * n + hyper.eta - 1.0);

    state.e_beta = vb_update_beta(state, hyper);  // uses the updated e_sigma2

    if (!(state.e_sigma2 > 0.0 && state.e_gamma2 > 0.0 && state.e_beta > 0.0))
      throw NumericError("VB scalar moment left the positive domain");

    const double residual = (state.e_x - x_prev).norm() + std::abs(state.e_sigma2 - s_prev) +
                            std::abs(state.e_gamma2 - g_prev) +
                            std::abs(state.e_beta - b_prev);
    state.residual_history.push_back(residual);
    state.final_residual = residual;
    state.iterations = k + 1;
    if (residual <= epsilon) {
      state.converged = true;
      break;
    }
  }

  EstimateResult est;
  est.method = "vb";
  est.x_hat = state.e_x;
  est.sigma2 = state.e_sigma2;
  est.gamma2 = state.e_gamma2;
  est.beta = state.e_beta;
  est.iterations = state.iterations;
  est.converged = state.converged;
  est.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {est, state};
}

}  // namespace oemdec
