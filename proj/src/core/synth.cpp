#include "core/synth.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <thread>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace oemdec {

void SimConfig::validate() const {
  if (!(sigma2_h > 0.0)) throw ParamError("sigma2_h must be > 0");
  if (!(sigma2_c >= 0.0)) throw ParamError("sigma2_c must be >= 0");
  if (!(sigma2_n >= 0.0)) throw ParamError("sigma2_n must be >= 0");
}

namespace {

int rounded(double v) { return static_cast<int>(std::lround(v)); }

// Separable unit-peak Gaussian mask truncated at 4 sigma.
std::vector<double> blur_taps(double sigma2_c) {
  if (sigma2_c == 0.0) return {1.0};
  const int reach = static_cast<int>(std::ceil(4.0 * std::sqrt(sigma2_c)));
  std::vector<double> taps(2 * reach + 1);
  for (int i = -reach; i <= reach; ++i)
    taps[i + reach] = std::exp(-0.5 * i * i / sigma2_c);
  return taps;
}

ImageF blur_zero_padded(const ImageF& src, double sigma2_c) {
  const std::vector<double> taps = blur_taps(sigma2_c);
  const int reach = static_cast<int>(taps.size() / 2);
  ImageF tmp(src.width, src.height), out(src.width, src.height);
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (int k = -reach; k <= reach; ++k) {
        const int xx = x + k;
        if (xx >= 0 && xx < src.width) acc += taps[k + reach] * src.at(xx, y);
      }
      tmp.at(x, y) = acc;
    }
  for (int y = 0; y < src.height; ++y)
    for (int x = 0; x < src.width; ++x) {
      double acc = 0.0;
      for (int k = -reach; k <= reach; ++k) {
        const int yy = y + k;
        if (yy >= 0 && yy < src.height) acc += taps[k + reach] * tmp.at(x, yy);
      }
      out.at(x, y) = acc;
    }
  return out;
}

}  // namespace

Eigen::VectorXd subsample_reference(const ImageF& image, const CoreMap& cores) {
  cores.validate();
  Eigen::VectorXd x(cores.count());
  for (int n = 0; n < cores.count(); ++n) {
    const int px = rounded(cores.positions[n].x());
    const int py = rounded(cores.positions[n].y());
    if (px < 0 || px >= image.width || py < 0 || py >= image.height)
      throw ParamError("core position outside the reference image");
    x[n] = image.at(px, py);
  }
  return x;
}

SimOutput simulate_system_image(const Eigen::VectorXd& x_true, const CoreMap& cores,
                                const SimConfig& config) {
  config.validate();
  cores.validate();
  if (x_true.size() != cores.count())
    throw ParamError("simulate: x_true length != core count");

  const CouplingKernel H = build_coupling_kernel(
      cores, KernelParams::gaussian(config.sigma2_h, config.kernel_truncation));
  const Eigen::VectorXd coupled = H.matrix * x_true;

  ImageF spikes(cores.width, cores.height);
  for (int n = 0; n < cores.count(); ++n) {
    const int px = std::min(rounded(cores.positions[n].x()), cores.width - 1);
    const int py = std::min(rounded(cores.positions[n].y()), cores.height - 1);
    spikes.at(px, py) += coupled[n];
  }

  SimOutput out;
  out.g = config.sigma2_c > 0.0 ? blur_zero_padded(spikes, config.sigma2_c)
                                : std::move(spikes);
  if (config.sigma2_n > 0.0) {
    Rng rng(config.rng_seed);
    const double sd = std::sqrt(config.sigma2_n);
    for (Eigen::Index i = 0; i < out.g.data.size(); ++i) out.g.data[i] += sd * rng.normal();
  }

  const int radius = static_cast<int>(std::ceil(std::sqrt(config.sigma2_c)));
  out.y.resize(cores.count());
  for (int n = 0; n < cores.count(); ++n) {
    const int px = std::min(rounded(cores.positions[n].x()), cores.width - 1);
    const int py = std::min(rounded(cores.positions[n].y()), cores.height - 1);
    if (config.extraction == Extraction::core_value || radius == 0) {
      out.y[n] = out.g.at(px, py);
      continue;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int dy = -radius; dy <= radius; ++dy)
      for (int dx = -radius; dx <= radius; ++dx) {
        if (dx * dx + dy * dy > radius * radius) continue;
        const int xx = px + dx, yy = py + dy;
        if (out.g.in_bounds(xx, yy)) best = std::max(best, out.g.at(xx, yy));
      }
    out.y[n] = best;
  }
  return out;
}

double rmse(const Eigen::VectorXd& x, const Eigen::VectorXd& x_hat) {
  if (x.size() != x_hat.size()) throw ParamError("rmse: length mismatch");
  return std::sqrt((x - x_hat).squaredNorm() / static_cast<double>(x.size()));
}

CoreMap hex_lattice(int width, int height, double spacing, double margin, double jitter,
                    uint64_t seed) {
  if (!(spacing > 0.0)) throw ParamError("spacing must be > 0");
  if (!(margin >= 0.0) || !(jitter >= 0.0))
    throw ParamError("margin and jitter must be >= 0");
  CoreMap map;
  map.width = width;
  map.height = height;
  Rng rng(seed);
  const double row_step = spacing * std::sqrt(3.0) / 2.0;
  int row = 0;
  for (double y = margin; y <= height - 1 - margin; y += row_step, ++row) {
    const double offset = (row % 2 == 0) ? 0.0 : spacing / 2.0;
    for (double x = margin + offset; x <= width - 1 - margin; x += spacing) {
      double px = x, py = y;
      if (jitter > 0.0) {
        px += jitter * (2.0 * rng.uniform() - 1.0);
        py += jitter * (2.0 * rng.uniform() - 1.0);
        px = std::clamp(px, 0.0, width - 1.0);
        py = std::clamp(py, 0.0, height - 1.0);
      }
      map.positions.emplace_back(px, py);
    }
  }
  map.validate();
  return map;
}

ImageF phantom_image(int width, int height) {
  ImageF img(width, height);
  const double w = width, h = height;
  auto bump = [](double dx, double dy, double s) { return std::exp(-(dx * dx + dy * dy) / (2.0 * s * s)); };
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double u = x / (w - 1.0), v = y / (h - 1.0);
      double val = 30.0 + 55.0 * u + 20.0 * v;
      val += 95.0 * bump(u - 0.32, v - 0.34, 0.16);
      val += 70.0 * bump(u - 0.74, v - 0.62, 0.10);
      val += 45.0 * bump(u - 0.25, v - 0.78, 0.07);
      // Soft vertical bars in the upper-right quadrant.
      if (u > 0.55 && v < 0.35)
        val += 40.0 * (0.5 + 0.5 * std::cos(2.0 * M_PI * u * 9.0));
      img.at(x, y) = std::clamp(val, 0.0, 255.0);
    }
  return img;
}

ImageF gaussian_spot_image(const CoreMap& cores, const Eigen::VectorXd& amplitudes,
                           double sigma2_c) {
  cores.validate();
  if (amplitudes.size() != cores.count())
    throw ParamError("gaussian_spot_image: amplitude length != core count");
  ImageF spikes(cores.width, cores.height);
  for (int n = 0; n < cores.count(); ++n) {
    const int px = std::min(rounded(cores.positions[n].x()), cores.width - 1);
    const int py = std::min(rounded(cores.positions[n].y()), cores.height - 1);
    spikes.at(px, py) += amplitudes[n];
  }
  return sigma2_c > 0.0 ? blur_zero_padded(spikes, sigma2_c) : spikes;
}

std::string method_name(Method m) {
  switch (m) {
    case Method::mcmc: return "mcmc";
    case Method::vb: return "vb";
    case Method::admm: return "admm";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "mcmc") return Method::mcmc;
  if (name == "vb") return Method::vb;
  if (name == "admm") return Method::admm;
  throw ParamError("unknown method: " + name);
}

void SweepOptions::validate() const {
  if (sigma2_h_sim.empty() || sigma2_n.empty())
    throw ParamError("sweep grids must not be empty");
  if (n_seeds < 1) throw ParamError("n_seeds must be >= 1");
  if (jobs < 1) throw ParamError("jobs must be >= 1");
  cov_params.validate();
  hyper.validate();
}

namespace {

struct SweepCell {
  size_t ih, id, in, is;
  double s2h_sim, s2h_dec, s2n;
  uint64_t seed;
};

SweepRow run_cell(const ImageF& reference, const CoreMap& cores, const SweepOptions& opt,
                  const SolverSpec& solver, const SpatialCovariance& Delta,
                  const std::map<double, CouplingKernel>& kernels, const SweepCell& cell) {
  SweepRow row;
  row.sigma2_h_sim = cell.s2h_sim;
  row.sigma2_h_deconv = cell.s2h_dec;
  row.sigma2_n = cell.s2n;
  row.seed = cell.seed;
  row.solver = method_name(solver.method);
  row.status = "ok";
  try {
    SimConfig sim;
    sim.sigma2_h = cell.s2h_sim;
    sim.sigma2_c = opt.sigma2_c;
    sim.sigma2_n = cell.s2n;
    sim.rng_seed = cell.seed;
    sim.extraction = opt.extraction;
    sim.kernel_truncation = opt.kernel_truncation;

    const Eigen::VectorXd x_true = subsample_reference(reference, cores);
    const SimOutput out = simulate_system_image(x_true, cores, sim);
    row.rmse_before = rmse(x_true, out.y);

    const CouplingKernel& H = kernels.at(cell.s2h_dec);
    const auto t0 = std::chrono::steady_clock::now();
    Eigen::VectorXd x_hat;
    switch (solver.method) {
      case Method::mcmc: {
        GibbsConfig c = solver.gibbs;
        c.rng_seed = derive_seed(cell.seed, 0xa11ce);
        x_hat = run_gibbs(out.y, H, Delta, opt.hyper, c).first.x_hat;
        break;
      }
      case Method::vb:
        x_hat = run_vb(out.y, H, Delta, opt.hyper, solver.vb).first.x_hat;
        break;
      case Method::admm: {
        if (solver.admm_pick_by_rmse) {
          const auto entries = lambda_sweep(out.y, H, Delta, &x_true, solver.admm);
          for (const auto& e : entries)
            if (e.best) x_hat = e.result.x_hat;
        } else {
          x_hat = run_admm(out.y, H, Delta, solver.admm).first.x_hat;
        }
        break;
      }
    }
    row.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.rmse_after = rmse(x_true, x_hat);
  } catch (const std::exception& e) {
    row.status = e.what();
  }
  return row;
}

}  // namespace

std::vector<SweepRow> sweep_experiment(const ImageF& reference, const CoreMap& cores,
                                       const SweepOptions& options,
                                       const SolverSpec& solver) {
  options.validate();
  cores.validate();

  const SpatialCovariance Delta = build_covariance(cores, options.cov_params,
                                                   options.cov_jitter);

  std::vector<SweepCell> cells;
  std::map<double, CouplingKernel> kernels;
  for (size_t ih = 0; ih < options.sigma2_h_sim.size(); ++ih) {
    const std::vector<double> dec_list = options.sigma2_h_deconv.empty()
                                             ? std::vector<double>{options.sigma2_h_sim[ih]}
                                             : options.sigma2_h_deconv;
    for (size_t id = 0; id < dec_list.size(); ++id)
      for (size_t in = 0; in < options.sigma2_n.size(); ++in)
        for (int is = 0; is < options.n_seeds; ++is) {
          SweepCell c;
          c.ih = ih;
          c.id = id;
          c.in = in;
          c.is = static_cast<size_t>(is);
          c.s2h_sim = options.sigma2_h_sim[ih];
          c.s2h_dec = dec_list[id];
          c.s2n = options.sigma2_n[in];
          c.seed = derive_seed(options.base_seed, ih, id * 1000 + in, is);
          cells.push_back(c);
          if (!kernels.count(c.s2h_dec))
            kernels.emplace(c.s2h_dec,
                            build_coupling_kernel(cores, KernelParams::gaussian(
                                                             c.s2h_dec,
                                                             options.kernel_truncation)));
        }
  }

  std::vector<SweepRow> rows(cells.size());
  if (options.jobs <= 1) {
    for (size_t i = 0; i < cells.size(); ++i)
      rows[i] = run_cell(reference, cores, options, solver, Delta, kernels, cells[i]);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= cells.size()) return;
        rows[i] = run_cell(reference, cores, options, solver, Delta, kernels, cells[i]);
      }
    };
    std::vector<std::thread> pool;
    const int nthreads = std::min<int>(options.jobs, static_cast<int>(cells.size()));
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return rows;
}

}  // namespace oemdec
