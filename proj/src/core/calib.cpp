#include "core/calib.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "core/errors.hpp"

namespace oemdec {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112353;
}

CoreMap detect_cores(const ImageF& image, double min_separation, double intensity_floor) {
  if (!(min_separation >= 0.0)) throw ParamError("min_separation must be >= 0");
  if (!(intensity_floor > 0.0 && intensity_floor <= 1.0))
    throw ParamError("intensity_floor must lie in (0,1]");
  const double max_v = image.data.maxCoeff();
  const double min_v = image.data.minCoeff();
  if (!(max_v > min_v)) throw ParamError("detect_cores: image is constant");
  const double threshold = intensity_floor * max_v;

  // 8-connected component labeling over the thresholded mask.
  const int w = image.width, h = image.height;
  std::vector<int> label(static_cast<size_t>(w) * h, -1);
  struct Blob {
    double wx = 0.0, wy = 0.0, mass = 0.0, peak = 0.0;
  };
  std::vector<Blob> blobs;
  std::vector<int> stack;
  for (int y0 = 0; y0 < h; ++y0)
    for (int x0 = 0; x0 < w; ++x0) {
      const int idx0 = y0 * w + x0;
      if (label[idx0] >= 0 || image.data[idx0] < threshold) continue;
      const int id = static_cast<int>(blobs.size());
      blobs.emplace_back();
      stack.push_back(idx0);
      label[idx0] = id;
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        const int x = idx % w, y = idx / w;
        const double v = image.data[idx];
        Blob& b = blobs[id];
        b.wx += v * x;
        b.wy += v * y;
        b.mass += v;
        b.peak = std::max(b.peak, v);
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            const int nidx = ny * w + nx;
            if (label[nidx] < 0 && image.data[nidx] >= threshold) {
              label[nidx] = id;
              stack.push_back(nidx);
            }
          }
      }
    }
  if (blobs.empty()) throw ParamError("no cores found; lower intensity_floor");

  struct Candidate {
    Eigen::Vector2d pos;
    double peak;
  };
  std::vector<Candidate> cands;
  cands.reserve(blobs.size());
  for (const Blob& b : blobs)
    cands.push_back({{b.wx / b.mass, b.wy / b.mass}, b.peak});
  // Brighter first; position breaks ties so the order is reproducible.
  std::sort(cands.begin(), cands.end(), [](const Candidate& a, const Candidate& b) {
    if (a.peak != b.peak) return a.peak > b.peak;
    if (a.pos.y() != b.pos.y()) return a.pos.y() < b.pos.y();
    return a.pos.x() < b.pos.x();
  });

  CoreMap map;
  map.width = w;
  map.height = h;
  for (const Candidate& c : cands) {
    bool keep = true;
    for (const auto& p : map.positions)
      if (distance(p, c.pos) < min_separation) {
        keep = false;
        break;
      }
    if (keep) map.positions.push_back(c.pos);
  }
  map.validate();
  return map;
}

FitGrid FitGrid::defaults() {
  FitGrid g;
  for (int i = 1; i <= 20; ++i) g.length_scales.push_back(static_cast<double>(i));
  for (int i = 1; i <= 8; ++i) g.exponents.push_back(0.25 * i);
  return g;
}

void FitGrid::validate() const {
  if (length_scales.empty() || exponents.empty()) throw ParamError("fit grid is empty");
  for (double l : length_scales)
    if (!(l > 0.0)) throw ParamError("grid length scales must be > 0");
  for (double k : exponents)
    if (!(k > 0.0 && k <= 2.0)) throw ParamError("grid exponents must lie in (0,2]");
}

double covariance_fit_objective(const CoreMap& cores, const Eigen::VectorXd& field,
                                const CovarianceParams& params, double jitter) {
  if (field.size() != cores.count())
    throw ParamError("fit objective: field length != core count");
  const SpatialCovariance cov = build_covariance(cores, params, jitter);
  const double n = static_cast<double>(field.size());
  const double quad = std::max(cov.quad_inverse(field), 1e-300);
  const double gamma2_hat = quad / n;
  // -0.5*(n*log(2*pi*g2) + log|Delta| + quad/g2), with quad/g2 = n at the profile.
  return -0.5 * (n * (kLog2Pi + std::log(gamma2_hat)) + cov.log_det + n);
}

CovarianceParams fit_covariance_params(const CoreMap& cores,
                                       const std::vector<Eigen::VectorXd>& fields,
                                       const FitGrid& grid, double jitter) {
  grid.validate();
  if (fields.empty()) throw ParamError("at least one training field is required");

  std::vector<double> ells = grid.length_scales, kappas = grid.exponents;
  std::sort(ells.begin(), ells.end());
  std::sort(kappas.begin(), kappas.end());

  double sum_ell = 0.0, sum_kappa = 0.0;
  for (const Eigen::VectorXd& field : fields) {
    double best = -std::numeric_limits<double>::infinity();
    double best_ell = 0.0, best_kappa = 0.0;
    bool any = false;
    for (double ell : ells)
      for (double kappa : kappas) {
        double value;
        try {
          value = covariance_fit_objective(cores, field, {ell, kappa}, jitter);
        } catch (const NumericError&) {
          continue;  // non-PD grid point
        }
        if (value > best) {  // strict: ties keep the lexicographically first
          best = value;
          best_ell = ell;
          best_kappa = kappa;
          any = true;
        }
      }
    if (!any) throw ParamError("no positive-definite grid point; adjust the grid or jitter");
    sum_ell += best_ell;
    sum_kappa += best_kappa;
  }
  return {sum_ell / fields.size(), sum_kappa / fields.size()};
}

}  // namespace oemdec
