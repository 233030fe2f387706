#pragma once

#include <Eigen/Sparse>

#include "core/core_map.hpp"

namespace oemdec {

// Cross-coupling kernel parameters for exp(-(d/alpha_h)^beta_h).
// The single-width Gaussian kernel exp(-d^2/(2*sigma2_h)) is the special
// case beta_h = 2, alpha_h = sqrt(2*sigma2_h).
struct KernelParams {
  double alpha_h = 4.0;
  double beta_h = 0.8;
  double truncation_radius = 20.0;  // pixels; 0 disables truncation
  bool row_normalize = false;

  static KernelParams gaussian(double sigma2_h, double truncation_radius = 20.0,
                               bool row_normalize = false);
  void validate() const;
};

// N1 x N1 nonnegative coupling operator over a core map. Symmetric before
// row normalization; entries beyond the truncation radius are exactly zero.
struct CouplingKernel {
  Eigen::SparseMatrix<double> matrix;  // column-major
  KernelParams params;

  int size() const { return static_cast<int>(matrix.rows()); }
};

CouplingKernel build_coupling_kernel(const CoreMap& cores, const KernelParams& params);

// Hx, exact matrix-vector product. Throws ParamError on dimension mismatch.
Eigen::VectorXd forward_apply(const CouplingKernel& kernel, const Eigen::VectorXd& x);

}  // namespace oemdec
