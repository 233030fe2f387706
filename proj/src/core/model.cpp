#include "core/model.hpp"

#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace oemdec {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
}

void Hyperparams::validate() const {
  if (!(alpha > 0.0 && alpha_o > 0.0 && beta_o > 0.0 && eta > 0.0 && nu > 0.0))
    throw ParamError("hyper-parameters must all be > 0");
}

Eigen::VectorXd add_noise(const Eigen::VectorXd& y_clean, double sigma2_n, uint64_t rng_seed) {
  if (!(sigma2_n >= 0.0)) throw ParamError("noise variance must be >= 0");
  if (sigma2_n == 0.0) return y_clean;
  Rng rng(rng_seed);
  const double sd = std::sqrt(sigma2_n);
  Eigen::VectorXd y = y_clean;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += sd * rng.normal();
  return y;
}

double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double sigma2,
                      const CouplingKernel& H) {
  if (!(sigma2 > 0.0)) throw ParamError("sigma2 must be > 0");
  if (y.size() != x.size() || y.size() != H.matrix.rows())
    throw ParamError("log_likelihood: dimension mismatch");
  const double n = static_cast<double>(y.size());
  const double r2 = (y - H.matrix * x).squaredNorm();
  return -0.5 * n * (kLog2Pi + std::log(sigma2)) - r2 / (2.0 * sigma2);
}

double log_posterior(const Eigen::VectorXd& x, double sigma2, double gamma2, double beta,
                     const Eigen::VectorXd& y, const CouplingKernel& H,
                     const SpatialCovariance& Delta, const Hyperparams& hyper) {
  hyper.validate();
  if (!(sigma2 > 0.0 && gamma2 > 0.0 && beta > 0.0))
    throw ParamError("sigma2, gamma2 and beta must be > 0");
  if ((x.array() < 0.0).any()) return -std::numeric_limits<double>::infinity();

  const double n = static_cast<double>(x.size());
  double lp = log_likelihood(y, x, sigma2, H);

  // Truncated-MVG prior on x as written: the gamma2-dependent normalizer is
  // kept, the orthant correction is not part of the model.
  lp += -0.5 * n * (kLog2Pi + std::log(gamma2)) - 0.5 * Delta.log_det -
        Delta.quad_inverse(x) / (2.0 * gamma2);

  // Inverse-Gamma(alpha, beta) on sigma2: beta enters through the normalizer.
  lp += hyper.alpha * std::log(beta) - std::lgamma(hyper.alpha) -
        (hyper.alpha + 1.0) * std::log(sigma2) - beta / sigma2;

  // Gamma(alpha_o, beta_o) prior on beta (shape-scale).
  lp += (hyper.alpha_o - 1.0) * std::log(beta) - beta / hyper.beta_o -
        std::lgamma(hyper.alpha_o) - hyper.alpha_o * std::log(hyper.beta_o);

  // Inverse-Gamma(eta, nu) prior on gamma2.
  lp += hyper.eta * std::log(hyper.nu) - std::lgamma(hyper.eta) -
        (hyper.eta + 1.0) * std::log(gamma2) - hyper.nu / gamma2;

  return lp;
}

InitState default_init(const Eigen::VectorXd& y, const CouplingKernel& H,
                       const Hyperparams& hyper) {
  hyper.validate();
  if (y.size() != H.matrix.rows()) throw ParamError("default_init: dimension mismatch");
  const Eigen::Index n = y.size();

  InitState init;
  init.x0 = y.cwiseMax(0.0);

  // Noise proxy: variance removed by a row-normalized neighborhood smoother
  // built from the coupling graph (no pixel 3x3 exists on irregular cores).
  Eigen::VectorXd smooth = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd row_sum = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < H.matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(H.matrix, k); it; ++it) {
      smooth[it.row()] += it.value() * y[it.col()];
      row_sum[it.row()] += it.value();
    }
  smooth.array() /= row_sum.array().max(1e-300);

  auto variance = [](const Eigen::VectorXd& v) {
    const double m = v.mean();
    return (v.array() - m).square().sum() / std::max<double>(1, v.size() - 1);
  };
  init.sigma2 = std::max(variance(y) - variance(smooth), 1e-6);
  init.gamma2 = std::max(variance(init.x0), 1e-6);
  init.beta = init.sigma2 * (hyper.alpha - 1.0) > 0.0 ? init.sigma2 * (hyper.alpha - 1.0)
                                                      : init.sigma2;
  return init;
}

}  // namespace oemdec
