#include "core/mcmc.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "core/errors.hpp"
#include "core/precision.hpp"

namespace oemdec {

void GibbsConfig::validate() const {
  if (n_mc < 1) throw ParamError("n_mc must be >= 1");
  if (n_bi < 0 || n_bi >= n_mc) throw ParamError("need 0 <= n_bi < n_mc");
}

double InvGammaSpec::log_pdf(double v) const {
  if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
  return shape * std::log(scale) - std::lgamma(shape) - (shape + 1.0) * std::log(v) -
         scale / v;
}

double GammaSpec::log_pdf(double v) const {
  if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
  return -std::lgamma(shape) - shape * std::log(scale) + (shape - 1.0) * std::log(v) -
         v / scale;
}

double XConditional::log_kernel(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd d = x - mean;
  return -0.5 * d.dot(precision * d);
}

XConditional x_conditional(const Eigen::VectorXd& y, const CouplingKernel& H,
                           const SpatialCovariance& Delta, double sigma2, double gamma2) {
  if (!(sigma2 > 0.0 && gamma2 > 0.0)) throw ParamError("sigma2 and gamma2 must be > 0");
  XConditional c;
  c.precision = (Eigen::MatrixXd(H.matrix.transpose() * H.matrix)) / sigma2 +
                Delta.inverse / gamma2;
  Eigen::LLT<Eigen::MatrixXd> llt(c.precision);
  if (llt.info() != Eigen::Success)
    throw NumericError("x-conditional precision not PD; increase covariance jitter");
  c.mean = llt.solve(H.matrix.transpose() * y / sigma2);
  return c;
}

InvGammaSpec sigma2_conditional(const Eigen::VectorXd& y, const CouplingKernel& H,
                                const Eigen::VectorXd& x, const Hyperparams& hyper,
                                double beta) {
  if (!(beta > 0.0)) throw ParamError("beta must be > 0");
  const double r2 = (y - H.matrix * x).squaredNorm();
  return {hyper.alpha + 0.5 * static_cast<double>(y.size()), beta + 0.5 * r2};
}

GammaSpec beta_conditional(double sigma2, const Hyperparams& hyper) {
  if (!(sigma2 > 0.0)) throw ParamError("sigma2 must be > 0");
  return {hyper.alpha + hyper.alpha_o, sigma2 * hyper.beta_o / (sigma2 + hyper.beta_o)};
}

InvGammaSpec gamma2_conditional(const Eigen::VectorXd& x, const SpatialCovariance& Delta,
                                const Hyperparams& hyper) {
  return {hyper.eta + 0.5 * static_cast<double>(x.size()),
          hyper.nu + 0.5 * Delta.quad_inverse(x)};
}

namespace {

// One systematic sweep of univariate truncated-normal updates targeting
// N_{R+}(mu, Q^{-1}) with Q = inv_s2*H^T H + inv_g2*Delta^{-1}. The running
// products rh = H^T H x and rd = Delta^{-1} x are updated in place.
void coordinate_sweep(const PrecisionOperator& op, double inv_s2, double inv_g2,
                      const Eigen::VectorXd& b, Eigen::VectorXd& x, Eigen::VectorXd& rh,
                      Eigen::VectorXd& rd, Rng& rng) {
  const int n = op.size();
  const auto& hth = op.hth();
  const auto& dinv = op.dinv();
  for (int i = 0; i < n; ++i) {
    const double qii = inv_s2 * op.hth_diag()[i] + inv_g2 * dinv(i, i);
    const double ri = inv_s2 * rh[i] + inv_g2 * rd[i];
    const double mu_i = (b[i] - (ri - qii * x[i])) / qii;
    const double xi = rng.trunc_normal_lower(mu_i, 1.0 / std::sqrt(qii));
    const double delta = xi - x[i];
    if (delta != 0.0) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(hth, i); it; ++it)
        rh[it.row()] += delta * it.value();
      rd.noalias() += delta * dinv.col(i);
      x[i] = xi;
    }
  }
}

// Exact Hamiltonian draw from N_{R+}(mu, Q^{-1}) given the lower Cholesky
// factor L of Q (Pakman & Paninski style wall bounces, travel time pi/2).
Eigen::VectorXd hmc_draw(const Eigen::MatrixXd& chol_lower, const Eigen::VectorXd& mu,
                         const Eigen::VectorXd& x_start, Rng& rng) {
  const int n = static_cast<int>(mu.size());
  const auto L = chol_lower.triangularView<Eigen::Lower>();
  // x = mu + F^T z with F = L^{-1}; constraint j reads (F^T z)_j + mu_j >= 0.
  Eigen::MatrixXd F = L.solve(Eigen::MatrixXd::Identity(n, n));

  Eigen::VectorXd x0 = x_start.cwiseMax(0.0);
  const double nudge = 1e-12 * (1.0 + x0.maxCoeff());
  x0 = x0.cwiseMax(nudge);  // strictly inside the orthant
  Eigen::VectorXd z = chol_lower.transpose() * (x0 - mu);
  Eigen::VectorXd p(n);
  for (int i = 0; i < n; ++i) p[i] = rng.normal();

  double remaining = M_PI / 2.0;
  const double t_min = 1e-10;
  for (int bounce = 0; bounce < 100 * n + 1000; ++bounce) {
    const Eigen::VectorXd zc = F.transpose() * z;  // x(t=0) - mu
    const Eigen::VectorXd pc = F.transpose() * p;
    double t_hit = remaining;
    int j_hit = -1;
    for (int j = 0; j < n; ++j) {
      const double r = std::hypot(zc[j], pc[j]);
      if (r < std::abs(mu[j])) continue;  // trajectory never reaches the wall
      const double psi = std::atan2(pc[j], zc[j]);
      const double acos_arg = std::max(-1.0, std::min(1.0, -mu[j] / r));
      const double base = std::acos(acos_arg);
      for (const double tc : {psi + base, psi - base, psi + base - 2.0 * M_PI,
                              psi - base + 2.0 * M_PI}) {
        if (tc > t_min && tc < t_hit) {
          t_hit = tc;
          j_hit = j;
        }
      }
    }
    const double c = std::cos(t_hit), s = std::sin(t_hit);
    const Eigen::VectorXd z_new = z * c + p * s;
    p = -z * s + p * c;
    z = z_new;
    if (j_hit < 0) break;  // reached total travel time
    remaining -= t_hit;
    const Eigen::VectorXd& f = F.col(j_hit);
    p -= (2.0 * f.dot(p) / f.squaredNorm()) * f;
    if (remaining <= t_min) break;
  }
  Eigen::VectorXd x = mu + F.transpose() * z;
  return x.cwiseMax(0.0);
}

}  // namespace

Eigen::VectorXd sample_x_conditional(const Eigen::VectorXd& y, const CouplingKernel& H,
                                     const SpatialCovariance& Delta, double sigma2,
                                     double gamma2, const Eigen::VectorXd& x_current,
                                     Rng& rng, XSampler sampler) {
  if (!(sigma2 > 0.0 && gamma2 > 0.0)) throw ParamError("sigma2 and gamma2 must be > 0");
  if ((x_current.array() < 0.0).any())
    throw ParamError("sample_x_conditional: x_current must be nonnegative");
  PrecisionOperator op(H, Delta);
  if (sampler == XSampler::coordinate_gibbs) {
    Eigen::VectorXd x = x_current;
    Eigen::VectorXd rh = op.hth() * x;
    Eigen::VectorXd rd = op.dinv() * x;
    const Eigen::VectorXd b = op.ht_apply(y) / sigma2;
    coordinate_sweep(op, 1.0 / sigma2, 1.0 / gamma2, b, x, rh, rd, rng);
    return x;
  }
  op.factor(1.0 / sigma2, 1.0 / gamma2, 0.0);
  const Eigen::VectorXd mu = op.factor_solve(op.ht_apply(y) / sigma2);
  return hmc_draw(op.chol_lower(), mu, x_current, rng);
}

double sample_sigma2(const Eigen::VectorXd& y, const CouplingKernel& H,
                     const Eigen::VectorXd& x, const Hyperparams& hyper, double beta,
                     Rng& rng) {
  const InvGammaSpec s = sigma2_conditional(y, H, x, hyper, beta);
  return rng.inv_gamma(s.shape, s.scale);
}

double sample_beta(double sigma2, const Hyperparams& hyper, Rng& rng) {
  const GammaSpec s = beta_conditional(sigma2, hyper);
  return rng.gamma(s.shape, s.scale);
}

double sample_gamma2(const Eigen::VectorXd& x, const SpatialCovariance& Delta,
                     const Hyperparams& hyper, Rng& rng) {
  const InvGammaSpec s = gamma2_conditional(x, Delta, hyper);
  return rng.inv_gamma(s.shape, s.scale);
}

std::pair<EstimateResult, Chain> run_gibbs(const Eigen::VectorXd& y, const CouplingKernel& H,
                                           const SpatialCovariance& Delta,
                                           const Hyperparams& hyper,
                                           const GibbsConfig& config) {
  config.validate();
  hyper.validate();
  if (y.size() != H.matrix.rows() || H.size() != Delta.size())
    throw ParamError("run_gibbs: dimension mismatch");
  const auto t0 = std::chrono::steady_clock::now();
  const int n = static_cast<int>(y.size());
  const double half_n = 0.5 * n;

  PrecisionOperator op(H, Delta);
  Rng rng(config.rng_seed);

  Eigen::VectorXd x;
  double sigma2, beta, gamma2;
  if (config.init) {
    if (config.init->x0.size() != n) throw ParamError("init x0 has wrong length");
    x = config.init->x0.cwiseMax(0.0);
    sigma2 = config.init->sigma2;
    beta = config.init->beta;
    gamma2 = config.init->gamma2;
    if (!(sigma2 > 0.0 && beta > 0.0 && gamma2 > 0.0))
      throw ParamError("init scalars must be > 0");
  } else {
    const InitState ini = default_init(y, H, hyper);
    x = ini.x0;
    sigma2 = ini.sigma2;
    beta = ini.beta;
    gamma2 = ini.gamma2;
  }

  const int keep = config.n_mc - config.n_bi;
  Chain chain;
  chain.n_mc = config.n_mc;
  chain.n_bi = config.n_bi;
  chain.x_samples.resize(keep, n);
  chain.sigma2_samples.resize(keep);
  chain.beta_samples.resize(keep);
  chain.gamma2_samples.resize(keep);

  const Eigen::VectorXd hty = op.ht_apply(y);
  Eigen::VectorXd rh, rd;
  const bool coord = config.x_sampler == XSampler::coordinate_gibbs;
  const int refresh = 50;  // bound roundoff drift of the running products

  for (int k = 0; k < config.n_mc; ++k) {
    if (coord) {
      if (k % refresh == 0) {
        rh = op.hth() * x;
        rd = op.dinv() * x;
      }
      const Eigen::VectorXd b = hty / sigma2;
      coordinate_sweep(op, 1.0 / sigma2, 1.0 / gamma2, b, x, rh, rd, rng);
    } else {
      op.factor(1.0 / sigma2, 1.0 / gamma2, 0.0);
      const Eigen::VectorXd mu = op.factor_solve(hty / sigma2);
      x = hmc_draw(op.chol_lower(), mu, x, rng);
    }

    const double r2 = (y - H.matrix * x).squaredNorm();
    sigma2 = rng.inv_gamma(hyper.alpha + half_n, beta + 0.5 * r2);
    beta = rng.gamma(hyper.alpha + hyper.alpha_o,
                     sigma2 * hyper.beta_o / (sigma2 + hyper.beta_o));
    const double quad = coord ? x.dot(rd) : Delta.quad_inverse(x);
    gamma2 = rng.inv_gamma(hyper.eta + half_n, hyper.nu + 0.5 * quad);

    if (k >= config.n_bi) {
      const int row = k - config.n_bi;
      chain.x_samples.row(row) = x.transpose();
      chain.sigma2_samples[row] = sigma2;
      chain.beta_samples[row] = beta;
      chain.gamma2_samples[row] = gamma2;
    }
  }

  EstimateResult est;
  est.method = "mcmc";
  est.x_hat = chain.x_samples.colwise().mean().transpose();
  est.sigma2 = chain.sigma2_samples.mean();
  est.beta = chain.beta_samples.mean();
  est.gamma2 = chain.gamma2_samples.mean();
  est.iterations = config.n_mc;
  est.converged = true;
  est.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {est, chain};
}

}  // namespace oemdec
