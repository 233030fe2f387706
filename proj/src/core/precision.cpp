#include "core/precision.hpp"

#include <limits>

#include "core/errors.hpp"

namespace oemdec {

PrecisionOperator::PrecisionOperator(const CouplingKernel& H, const SpatialCovariance& Delta)
    : n_(H.size()), h_(&H.matrix), dinv_(&Delta.inverse) {
  if (H.size() != Delta.size())
    throw ParamError("kernel and covariance sizes do not match");
  hth_ = (H.matrix.transpose() * H.matrix).pruned();
  hth_.makeCompressed();
  hth_diag_ = hth_.diagonal();
}

Eigen::VectorXd PrecisionOperator::apply(double a, double b, double c,
                                         const Eigen::VectorXd& x) const {
  Eigen::VectorXd out = a * (hth_ * x);
  out.noalias() += b * (*dinv_ * x);
  if (c != 0.0) out += c * x;
  return out;
}

void PrecisionOperator::assemble(double a, double b, double c, Eigen::MatrixXd& out) const {
  out = b * (*dinv_);
  for (int k = 0; k < hth_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(hth_, k); it; ++it)
      out(it.row(), it.col()) += a * it.value();
  if (c != 0.0) out.diagonal().array() += c;
}

void PrecisionOperator::factor(double a, double b, double c) {
  assemble(a, b, c, dense_);
  llt_.compute(dense_);
  if (llt_.info() != Eigen::Success)
    throw NumericError("precision matrix not PD; increase covariance jitter");
  factored_ = true;
  fa_ = a;
  fb_ = b;
  fc_ = c;
}

Eigen::VectorXd PrecisionOperator::factor_solve(const Eigen::VectorXd& rhs) const {
  if (!factored_) throw NumericError("factor_solve called before factor");
  return llt_.solve(rhs);
}

Eigen::VectorXd PrecisionOperator::solve(double a, double b, double c,
                                         const Eigen::VectorXd& rhs, double tol) {
  const double drift =
      !factored_ ? 1.0
                 : std::max({std::abs(a - fa_) / std::max(a, 1e-300),
                             std::abs(b - fb_) / std::max(b, 1e-300),
                             std::abs(c - fc_) / std::max(std::abs(c), 1e-300)});
  if (!factored_ || drift > 0.5) factor(a, b, c);

  const double rhs_norm = rhs.norm();
  if (rhs_norm == 0.0) return Eigen::VectorXd::Zero(n_);

  Eigen::VectorXd x = llt_.solve(rhs);
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd r = rhs - apply(a, b, c, x);
    const double rel = r.norm() / rhs_norm;
    if (rel <= tol) return x;
    if (rel >= 0.5 * prev) break;  // stalled, factor is too stale
    prev = rel;
    x += llt_.solve(r);
  }
  factor(a, b, c);
  x = llt_.solve(rhs);
  // One refinement pass mops up the last digits of the fresh factor.
  Eigen::VectorXd r = rhs - apply(a, b, c, x);
  if (r.norm() / rhs_norm > tol) x += llt_.solve(r);
  return x;
}

}  // namespace oemdec
