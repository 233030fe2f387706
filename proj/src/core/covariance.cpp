#include "core/covariance.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "core/errors.hpp"

namespace oemdec {

void CovarianceParams::validate() const {
  if (!(length_scale > 0.0)) throw ParamError("length_scale must be > 0");
  if (!(exponent > 0.0 && exponent <= 2.0))
    throw ParamError("exponent must lie in (0,2] for a positive-definite kernel");
}

Eigen::VectorXd SpatialCovariance::solve(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd out = chol_lower.triangularView<Eigen::Lower>().solve(rhs);
  chol_lower.triangularView<Eigen::Lower>().transpose().solveInPlace(out);
  return out;
}

double SpatialCovariance::quad_inverse(const Eigen::VectorXd& x) const {
  if (x.size() != matrix.rows()) throw ParamError("quad_inverse: dimension mismatch");
  return x.dot(inverse * x);
}

SpatialCovariance build_covariance(const CoreMap& cores, const CovarianceParams& params,
                                   double jitter) {
  params.validate();
  cores.validate();
  if (!(jitter >= 0.0)) throw ParamError("jitter must be >= 0");
  const int n = cores.count();

  SpatialCovariance cov;
  cov.params = params;
  cov.jitter = jitter;
  cov.matrix.resize(n, n);
  for (int j = 0; j < n; ++j) {
    cov.matrix(j, j) = 1.0 + jitter;
    for (int i = j + 1; i < n; ++i) {
      const double d = distance(cores.positions[i], cores.positions[j]);
      const double v = std::exp(-std::pow(d / params.length_scale, params.exponent));
      cov.matrix(i, j) = v;
      cov.matrix(j, i) = v;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(cov.matrix);
  if (llt.info() != Eigen::Success)
    throw NumericError("covariance not PD; increase jitter or reduce length scale");
  cov.chol_lower = llt.matrixL();
  cov.log_det = 2.0 * cov.chol_lower.diagonal().array().log().sum();
  cov.inverse = llt.solve(Eigen::MatrixXd::Identity(n, n));
  return cov;
}

}  // namespace oemdec
