#pragma once

#include <Eigen/Core>
#include <vector>

namespace oemdec {

// Positions of the fiber cores inside a width x height pixel grid.
// Coordinates are 0-based, sub-pixel capable, x in [0,width), y in [0,height).
struct CoreMap {
  int width = 0;
  int height = 0;
  std::vector<Eigen::Vector2d> positions;

  int count() const { return static_cast<int>(positions.size()); }

  // Throws ParamError if any position is out of bounds, the map is empty,
  // or two positions coincide exactly.
  void validate() const;
};

double distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b);

// Median nearest-neighbor distance, used to derive data-driven scales.
double median_nearest_distance(const CoreMap& map);

}  // namespace oemdec
