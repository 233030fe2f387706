#pragma once

#include <Eigen/Core>

#include "core/errors.hpp"

namespace oemdec {

// Grayscale image, row-major double samples.
struct ImageF {
  int width = 0;
  int height = 0;
  Eigen::VectorXd data;

  ImageF() = default;
  ImageF(int w, int h)
      : width(w), height(h), data(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w) * h)) {
    if (w <= 0 || h <= 0) throw ParamError("image dimensions must be positive");
  }

  double& at(int x, int y) { return data[static_cast<Eigen::Index>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<Eigen::Index>(y) * width + x]; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  Eigen::Index size() const { return data.size(); }
};

}  // namespace oemdec
