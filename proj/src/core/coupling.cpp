#include "core/coupling.hpp"

#include <cmath>
#include <vector>

#include "core/errors.hpp"

namespace oemdec {

KernelParams KernelParams::gaussian(double sigma2_h, double truncation_radius,
                                    bool row_normalize) {
  if (!(sigma2_h > 0.0)) throw ParamError("sigma2_h must be > 0");
  KernelParams p;
  p.alpha_h = std::sqrt(2.0 * sigma2_h);
  p.beta_h = 2.0;
  p.truncation_radius = truncation_radius;
  p.row_normalize = row_normalize;
  return p;
}

void KernelParams::validate() const {
  if (!(alpha_h > 0.0)) throw ParamError("alpha_h must be > 0");
  if (!(beta_h > 0.0)) throw ParamError("beta_h must be > 0");
  if (!(truncation_radius >= 0.0)) throw ParamError("truncation_radius must be >= 0");
}

CouplingKernel build_coupling_kernel(const CoreMap& cores, const KernelParams& params) {
  params.validate();
  cores.validate();
  const int n = cores.count();
  const double radius = params.truncation_radius;
  const bool truncated = radius > 0.0;

  auto weight = [&](double d) {
    return std::exp(-std::pow(d / params.alpha_h, params.beta_h));
  };

  std::vector<Eigen::Triplet<double>> trips;
  if (truncated) {
    // Bucket the cores so neighbor search stays O(n) per row.
    const double cell = radius;
    const int bw = static_cast<int>(cores.width / cell) + 1;
    const int bh = static_cast<int>(cores.height / cell) + 1;
    std::vector<std::vector<int>> buckets(static_cast<size_t>(bw) * bh);
    auto bucket_x = [&](double v) { return std::min(bw - 1, static_cast<int>(v / cell)); };
    auto bucket_y = [&](double v) { return std::min(bh - 1, static_cast<int>(v / cell)); };
    for (int i = 0; i < n; ++i)
      buckets[static_cast<size_t>(bucket_y(cores.positions[i].y())) * bw +
              bucket_x(cores.positions[i].x())]
          .push_back(i);
    trips.reserve(static_cast<size_t>(n) * 16);
    for (int i = 0; i < n; ++i) {
      const auto& p = cores.positions[i];
      const int bx = bucket_x(p.x()), by = bucket_y(p.y());
      trips.emplace_back(i, i, 1.0);  // exp(0) = 1
      for (int yy = std::max(0, by - 1); yy <= std::min(bh - 1, by + 1); ++yy)
        for (int xx = std::max(0, bx - 1); xx <= std::min(bw - 1, bx + 1); ++xx)
          for (int j : buckets[static_cast<size_t>(yy) * bw + xx]) {
            if (j <= i) continue;
            const double d = distance(p, cores.positions[j]);
            if (d > radius) continue;
            const double w = weight(d);
            trips.emplace_back(i, j, w);
            trips.emplace_back(j, i, w);
          }
    }
  } else {
    trips.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
      trips.emplace_back(i, i, 1.0);
      for (int j = i + 1; j < n; ++j) {
        const double w = weight(distance(cores.positions[i], cores.positions[j]));
        trips.emplace_back(i, j, w);
        trips.emplace_back(j, i, w);
      }
    }
  }

  CouplingKernel kernel;
  kernel.params = params;
  kernel.matrix.resize(n, n);
  kernel.matrix.setFromTriplets(trips.begin(), trips.end());

  if (params.row_normalize) {
    Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < kernel.matrix.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(kernel.matrix, k); it; ++it)
        row_sums[it.row()] += it.value();
    for (int k = 0; k < kernel.matrix.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(kernel.matrix, k); it; ++it)
        it.valueRef() /= row_sums[it.row()];
  }
  return kernel;
}

Eigen::VectorXd forward_apply(const CouplingKernel& kernel, const Eigen::VectorXd& x) {
  if (x.size() != kernel.matrix.cols())
    throw ParamError("forward_apply: intensity length does not match kernel size");
  return kernel.matrix * x;
}

}  // namespace oemdec
