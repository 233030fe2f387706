#pragma once

#include <cstdint>

#include "core/coupling.hpp"
#include "core/covariance.hpp"

namespace oemdec {

// Fixed hyper-parameters of the hierarchical model: inverse-Gamma(alpha, beta)
// on the noise variance with beta itself Gamma(alpha_o, beta_o) (shape-scale),
// and inverse-Gamma(eta, nu) on the intensity scale gamma^2.
struct Hyperparams {
  double alpha = 10.0;
  double alpha_o = 10.0;
  double beta_o = 0.1;
  double eta = 1e-3;
  double nu = 1e-3;

  void validate() const;
};

// y_clean + w with w ~ N(0, sigma2_n I); deterministic for a fixed seed.
Eigen::VectorXd add_noise(const Eigen::VectorXd& y_clean, double sigma2_n, uint64_t rng_seed);

// Gaussian log-likelihood of y given Hx and sigma2.
double log_likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& x, double sigma2,
                      const CouplingKernel& H);

// Unnormalized log-posterior over (x, sigma2, gamma2, beta); the only dropped
// constant is fixed for a given (y, H, Delta, hyper). Returns -inf when any
// x entry is negative. Used by the conjugacy checks of the Gibbs conditionals.
double log_posterior(const Eigen::VectorXd& x, double sigma2, double gamma2, double beta,
                     const Eigen::VectorXd& y, const CouplingKernel& H,
                     const SpatialCovariance& Delta, const Hyperparams& hyper);

// Data-driven starting point shared by the MCMC and VB solvers:
// x0 = max(y, 0), sigma2 from a neighbor-smoothing residual proxy,
// gamma2 = var(x0), beta matching the IG prior mean to sigma2.
struct InitState {
  Eigen::VectorXd x0;
  double sigma2 = 1.0;
  double gamma2 = 1.0;
  double beta = 1.0;
};

InitState default_init(const Eigen::VectorXd& y, const CouplingKernel& H,
                       const Hyperparams& hyper);

}  // namespace oemdec
