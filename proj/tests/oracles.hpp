#pragma once

// Test-only reference implementations: closed forms, quadrature and
// brute-force solvers kept independent of the library code paths they check.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// Moments of N(mu, sigma^2) conditioned on x >= lo.
struct TruncNormalMoments {
  double mean;
  double variance;
};

inline TruncNormalMoments trunc_normal_moments(double mu, double sigma, double lo = 0.0) {
  const double a = (lo - mu) / sigma;
  const double tail = 0.5 * std::erfc(a / std::sqrt(2.0));  // P(Z >= a)
  const double h = normal_pdf(a) / tail;                    // hazard
  TruncNormalMoments m;
  m.mean = mu + sigma * h;
  m.variance = sigma * sigma * (1.0 + a * h - h * h);
  return m;
}

// Log-densities written out independently of the library structs.
inline double log_inv_gamma_pdf(double v, double shape, double scale_b) {
  return shape * std::log(scale_b) - std::lgamma(shape) - (shape + 1.0) * std::log(v) -
         scale_b / v;
}

inline double log_gamma_pdf(double v, double shape, double scale) {
  return (shape - 1.0) * std::log(v) - v / scale - std::lgamma(shape) -
         shape * std::log(scale);
}

// Composite Simpson over [a,b] with n (even) intervals.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Trapezoid on a log-spaced grid, for heavy-tailed positive integrands.
inline double log_grid_integral(const std::function<double(double)>& f, double lo, double hi,
                                int n) {
  const double step = std::log(hi / lo) / (n - 1);
  double acc = 0.0;
  double prev_v = lo, prev_f = f(lo);
  for (int i = 1; i < n; ++i) {
    const double v = lo * std::exp(step * i);
    const double fv = f(v);
    acc += 0.5 * (prev_f + fv) * (v - prev_v);
    prev_v = v;
    prev_f = fv;
  }
  return acc;
}

struct Hyper {
  double alpha = 10.0;
  double alpha_o = 10.0;
  double beta_o = 0.1;
  double eta = 1e-3;
  double nu = 1e-3;
};

// Posterior-mean oracle for a 2-core instance by dense quadrature over the
// positive quadrant, with the scalar parameters marginalized: beta on a log
// grid, sigma^2 and gamma^2 through the exact Gamma integrals (validated
// against pure grid marginalization by validate_marginals()).
class QuadraturePosterior2 {
 public:
  QuadraturePosterior2(const Eigen::Vector2d& y, const Eigen::Matrix2d& H,
                       const Eigen::Matrix2d& Delta, const Hyper& hyper)
      : y_(y), h_(H), delta_inv_(Delta.inverse()), hy_(hyper) {
    // Cache the beta quadrature nodes: the sigma^2 integral is exact in r, so
    // weight_sigma_beta reduces to a fixed weighted sum over beta.
    const double scale = hy_.alpha_o * hy_.beta_o;
    const double lo = scale * 1e-4, hi = scale * 2e2;
    const int n = 800;
    const double step = std::log(hi / lo) / (n - 1);
    const double lg = std::lgamma(hy_.alpha + 1.0) - std::lgamma(hy_.alpha);
    beta_nodes_.resize(n);
    beta_log_.resize(n);
    beta_weight_.resize(n);
    for (int i = 0; i < n; ++i) {
      beta_nodes_[i] = lo * std::exp(step * i);
      beta_log_[i] = std::log(beta_nodes_[i]);
      // trapezoid cell width on the log grid
      const double left = i == 0 ? beta_nodes_[0] : lo * std::exp(step * (i - 0.5));
      const double right = i == n - 1 ? beta_nodes_[n - 1] : lo * std::exp(step * (i + 0.5));
      beta_weight_[i] = (right - left) *
                        std::exp(log_gamma_pdf(beta_nodes_[i], hy_.alpha_o, hy_.beta_o) + lg) /
                        (2.0 * M_PI);
    }
  }

  double residual2(const Eigen::Vector2d& x) const { return (y_ - h_ * x).squaredNorm(); }
  double quad(const Eigen::Vector2d& x) const { return x.dot(delta_inv_ * x); }

  // integral over sigma^2 and beta of the N=2 likelihood normalizer times the
  // IG(alpha,beta) and Gamma(alpha_o,beta_o) densities, as a function of r.
  double weight_sigma_beta(double r) const {
    double acc = 0.0;
    for (size_t i = 0; i < beta_nodes_.size(); ++i)
      acc += beta_weight_[i] * std::exp(hy_.alpha * beta_log_[i] -
                                        (hy_.alpha + 1.0) *
                                            std::log(beta_nodes_[i] + 0.5 * r));
    return acc;
  }

  // exact gamma^2 integral for N=2: nu^eta Gamma(eta+1) / (Gamma(eta) (nu+q/2)^(eta+1)).
  double weight_gamma(double q) const {
    return std::exp(hy_.eta * std::log(hy_.nu) + std::lgamma(hy_.eta + 1.0) -
                    std::lgamma(hy_.eta) -
                    (hy_.eta + 1.0) * std::log(hy_.nu + 0.5 * q));
  }

  double weight(const Eigen::Vector2d& x) const {
    return weight_sigma_beta(residual2(x)) * weight_gamma(quad(x));
  }

  // Posterior mean of x over [0, xmax]^2 with a Simpson tensor grid.
  Eigen::Vector2d posterior_mean(double xmax, int n = 320) const {
    const double h = xmax / n;
    double z = 0.0, m0 = 0.0, m1 = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double wi = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      for (int j = 0; j <= n; ++j) {
        const double wj = (j == 0 || j == n) ? 1.0 : (j % 2 ? 4.0 : 2.0);
        const Eigen::Vector2d x(i * h, j * h);
        const double w = wi * wj * weight(x);
        z += w;
        m0 += w * x[0];
        m1 += w * x[1];
      }
    }
    return {m0 / z, m1 / z};
  }

  // Max relative error of the two semi-analytic marginals against pure
  // log-grid quadrature at a few probe values.
  double validate_marginals() const {
    double worst = 0.0;
    for (double r : {0.05, 1.0, 10.0, 120.0}) {
      auto integrand = [&](double beta) {
        auto inner = [&](double s2) {
          return std::exp(-r / (2.0 * s2)) / (2.0 * M_PI * s2) *
                 std::exp(log_inv_gamma_pdf(s2, hy_.alpha, beta));
        };
        return log_grid_integral(inner, 1e-5, 1e4, 3000) *
               std::exp(log_gamma_pdf(beta, hy_.alpha_o, hy_.beta_o));
      };
      const double grid = log_grid_integral(integrand, 1e-5, 30.0, 1200);
      const double semi = weight_sigma_beta(r);
      worst = std::max(worst, std::abs(grid - semi) / semi);
    }
    for (double q : {0.01, 1.0, 25.0, 300.0}) {
      auto integrand = [&](double g2) {
        return std::exp(log_inv_gamma_pdf(g2, hy_.eta, hy_.nu)) / g2 *
               std::exp(-q / (2.0 * g2));
      };
      const double grid = log_grid_integral(integrand, 1e-7, 1e9, 6000);
      const double exact = weight_gamma(q);
      worst = std::max(worst, std::abs(grid - exact) / exact);
    }
    return worst;
  }

 private:
  Eigen::Vector2d y_;
  Eigen::Matrix2d h_;
  Eigen::Matrix2d delta_inv_;
  Hyper hy_;
};

// Brute-force active-set solution of min 0.5 x'Px - c'x s.t. x >= 0 for SPD P,
// by enumerating all 2^n active sets and checking the KKT conditions.
inline Eigen::VectorXd nonneg_qp_enumerate(const Eigen::MatrixXd& P,
                                           const Eigen::VectorXd& c) {
  const int n = static_cast<int>(c.size());
  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best = Eigen::VectorXd::Zero(n);
  for (int mask = 0; mask < (1 << n); ++mask) {
    std::vector<int> free_idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) free_idx.push_back(i);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (!free_idx.empty()) {
      const int m = static_cast<int>(free_idx.size());
      Eigen::MatrixXd pff(m, m);
      Eigen::VectorXd cf(m);
      for (int a = 0; a < m; ++a) {
        cf[a] = c[free_idx[a]];
        for (int b = 0; b < m; ++b) pff(a, b) = P(free_idx[a], free_idx[b]);
      }
      const Eigen::VectorXd xf = pff.ldlt().solve(cf);
      if ((xf.array() < -1e-12).any()) continue;  // infeasible free block
      for (int a = 0; a < m; ++a) x[free_idx[a]] = std::max(xf[a], 0.0);
    }
    const Eigen::VectorXd grad = P * x - c;
    bool kkt = true;
    for (int i = 0; i < n; ++i)
      if (!(mask & (1 << i)) && grad[i] < -1e-10 * (1.0 + c.norm())) kkt = false;
    if (!kkt) continue;
    const double obj = 0.5 * x.dot(P * x) - c.dot(x);
    if (obj < best_obj) {
      best_obj = obj;
      best = x;
    }
  }
  return best;
}

struct RunningStats {
  double n = 0.0, mean = 0.0, m2 = 0.0;
  void push(double v) {
    n += 1.0;
    const double d = v - mean;
    mean += d / n;
    m2 += d * (v - mean);
  }
  double variance() const { return m2 / (n - 1.0); }
  double se() const { return std::sqrt(variance() / n); }
};

}  // namespace oracle
