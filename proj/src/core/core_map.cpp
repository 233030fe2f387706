#include "core/core_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "core/errors.hpp"

namespace oemdec {

void CoreMap::validate() const {
  if (width <= 0 || height <= 0) throw ParamError("core map dimensions must be positive");
  if (positions.empty()) throw ParamError("core map must contain at least one core");
  for (const auto& p : positions) {
    if (!std::isfinite(p.x()) || !std::isfinite(p.y()))
      throw ParamError("core position must be finite");
    if (p.x() < 0.0 || p.x() >= width || p.y() < 0.0 || p.y() >= height)
      throw ParamError("core position outside [0,width) x [0,height)");
  }
  std::vector<Eigen::Vector2d> sorted = positions;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.x() != b.x() ? a.x() < b.x() : a.y() < b.y();
  });
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].x() == sorted[i - 1].x() && sorted[i].y() == sorted[i - 1].y())
      throw ParamError("two core positions coincide exactly");
  }
}

double distance(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  const double dx = a.x() - b.x();
  const double dy = a.y() - b.y();
  return std::sqrt(dx * dx + dy * dy);
}

double median_nearest_distance(const CoreMap& map) {
  const int n = map.count();
  if (n < 2) return 1.0;
  std::vector<double> nn(n, std::numeric_limits<double>::infinity());
  // Bucketed search keeps this near O(n) for realistic maps.
  const double cell = std::max(1.0, std::sqrt(static_cast<double>(map.width) * map.height / n));
  const int bw = std::max(1, static_cast<int>(map.width / cell) + 1);
  const int bh = std::max(1, static_cast<int>(map.height / cell) + 1);
  std::vector<std::vector<int>> buckets(static_cast<size_t>(bw) * bh);
  auto bucket_of = [&](const Eigen::Vector2d& p) {
    int bx = std::min(bw - 1, static_cast<int>(p.x() / cell));
    int by = std::min(bh - 1, static_cast<int>(p.y() / cell));
    return by * bw + bx;
  };
  for (int i = 0; i < n; ++i) buckets[bucket_of(map.positions[i])].push_back(i);
  for (int i = 0; i < n; ++i) {
    const auto& p = map.positions[i];
    int bx = std::min(bw - 1, static_cast<int>(p.x() / cell));
    int by = std::min(bh - 1, static_cast<int>(p.y() / cell));
    for (int ring = 0; ring <= std::max(bw, bh); ++ring) {
      for (int yy = std::max(0, by - ring); yy <= std::min(bh - 1, by + ring); ++yy)
        for (int xx = std::max(0, bx - ring); xx <= std::min(bw - 1, bx + ring); ++xx) {
          if (std::max(std::abs(yy - by), std::abs(xx - bx)) != ring) continue;
          for (int j : buckets[static_cast<size_t>(yy) * bw + xx])
            if (j != i) nn[i] = std::min(nn[i], distance(p, map.positions[j]));
        }
      // Buckets beyond this ring only hold points farther than ring*cell.
      if (std::isfinite(nn[i]) && nn[i] <= ring * cell) break;
    }
  }
  std::vector<double> v = nn;
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  return v[n / 2];
}

}  // namespace oemdec
