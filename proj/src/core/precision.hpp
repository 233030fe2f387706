#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "core/coupling.hpp"
#include "core/covariance.hpp"

namespace oemdec {

// Shared-structure operator Q(a,b,c) = a*H^T H + b*Delta^{-1} + c*I used by
// every solver. H^T H is sparse and Delta^{-1} dense; both are fixed while the
// scalar weights move, so the dense factor can be reused between iterations
// and corrected by iterative refinement instead of refactoring each time.
class PrecisionOperator {
 public:
  PrecisionOperator(const CouplingKernel& H, const SpatialCovariance& Delta);

  int size() const { return n_; }
  const Eigen::SparseMatrix<double>& hth() const { return hth_; }
  const Eigen::VectorXd& hth_diag() const { return hth_diag_; }
  const Eigen::MatrixXd& dinv() const { return *dinv_; }
  const Eigen::SparseMatrix<double>& h() const { return *h_; }

  Eigen::VectorXd ht_apply(const Eigen::VectorXd& v) const { return h_->transpose() * v; }
  Eigen::VectorXd apply(double a, double b, double c, const Eigen::VectorXd& x) const;

  // Dense assembly + LLT at the given weights. Throws NumericError when the
  // matrix is not positive definite.
  void factor(double a, double b, double c);
  bool factored() const { return factored_; }
  Eigen::VectorXd factor_solve(const Eigen::VectorXd& rhs) const;
  Eigen::MatrixXd factor_solve_matrix() const {
    return llt_.solve(Eigen::MatrixXd::Identity(n_, n_));
  }
  Eigen::MatrixXd chol_lower() const { return llt_.matrixL(); }

  // Solve Q(a,b,c) x = rhs to relative residual <= tol. Reuses the current
  // factor with refinement when the weights drifted; refactors on stall.
  Eigen::VectorXd solve(double a, double b, double c, const Eigen::VectorXd& rhs,
                        double tol = 1e-12);

 private:
  void assemble(double a, double b, double c, Eigen::MatrixXd& out) const;

  int n_ = 0;
  const Eigen::SparseMatrix<double>* h_ = nullptr;
  const Eigen::MatrixXd* dinv_ = nullptr;
  Eigen::SparseMatrix<double> hth_;
  Eigen::VectorXd hth_diag_;
  Eigen::MatrixXd dense_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  bool factored_ = false;
  double fa_ = 0.0, fb_ = 0.0, fc_ = 0.0;  // weights of the current factor
};

}  // namespace oemdec
