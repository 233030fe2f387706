#include "cli_common.hpp"
#include "io/pgm.hpp"
#include "io/tables.hpp"

namespace cli {

namespace {

struct InterpolateArgs {
  std::string config_path;
  std::string xhat_path;
  std::string cores;
  double ell = 6.0;
  double kappa = 1.0;
  double gamma2 = 0.0;
  double jitter = 0.0;
  int width = 0;
  int height = 0;
  std::string points_path;
  double confidence = 0.0;
  std::string out_dir;
};

void run(InterpolateArgs& a, const CLI::App& sub) {
  json cfg;
  if (!a.config_path.empty()) cfg = load_config(a.config_path);
  const ConfigMerge merge(a.config_path.empty() ? nullptr : &cfg);
  merge("xhat", sub.get_option("--xhat"), a.xhat_path);
  merge("cores", sub.get_option("--cores"), a.cores);
  merge("ell", sub.get_option("--ell"), a.ell);
  merge("kappa", sub.get_option("--kappa"), a.kappa);
  merge("gamma2", sub.get_option("--gamma2"), a.gamma2);
  merge("jitter", sub.get_option("--jitter"), a.jitter);
  merge("width", sub.get_option("--width"), a.width);
  merge("height", sub.get_option("--height"), a.height);
  merge("points", sub.get_option("--points"), a.points_path);
  merge("confidence", sub.get_option("--confidence"), a.confidence);

  if (a.xhat_path.empty() || a.cores.empty())
    throw UsageError("--xhat and --cores are required");
  if (!(a.gamma2 > 0.0)) throw UsageError("--gamma2 is required and must be > 0");
  const bool grid_mode = a.points_path.empty();
  if (grid_mode && (a.width <= 0 || a.height <= 0))
    throw UsageError("--width and --height are required unless --points is given");

  std::vector<double> x_hat;
  try {
    x_hat = oemdec::io::read_values_csv(a.xhat_path);
  } catch (const oemdec::io::IoError& e) {
    throw UsageError(e.what());
  }
  CoreMapPtr map = cores_from_csv(a.cores, grid_mode ? a.width : 0, grid_mode ? a.height : 0);
  const int n = oemdec_core_map_count(map.get());
  if (static_cast<int>(x_hat.size()) != n)
    throw UsageError("xhat length does not match the core count");

  ensure_out_dir(a.out_dir);
  std::vector<std::string> outputs;
  if (grid_mode) {
    const size_t total = static_cast<size_t>(a.width) * a.height;
    std::vector<double> mean(total), variance(total);
    check(oemdec_gp_interpolate(map.get(), x_hat.data(), n, a.gamma2, a.ell, a.kappa,
                                a.jitter, a.width, a.height, mean.data(), variance.data()),
          "gp interpolation");
    oemdec::io::write_pgm_preview(join_path(a.out_dir, "mean.pgm"), a.width, a.height,
                                  mean.data());
    oemdec::io::write_raw_f64(join_path(a.out_dir, "mean.f64"), a.width, a.height,
                              mean.data());
    oemdec::io::write_pgm_preview(join_path(a.out_dir, "variance.pgm"), a.width, a.height,
                                  variance.data());
    oemdec::io::write_raw_f64(join_path(a.out_dir, "variance.f64"), a.width, a.height,
                              variance.data());
    outputs = {"mean.pgm", "mean.f64", "mean.f64.json", "variance.pgm", "variance.f64",
               "variance.f64.json"};
    if (a.confidence > 0.0) {
      std::vector<double> hw(total);
      check(oemdec_confidence_half_width(variance.data(), static_cast<int>(total),
                                         a.confidence, hw.data()),
            "confidence half-width");
      oemdec::io::write_pgm_preview(join_path(a.out_dir, "confidence.pgm"), a.width,
                                    a.height, hw.data());
      oemdec::io::write_raw_f64(join_path(a.out_dir, "confidence.f64"), a.width, a.height,
                                hw.data());
      outputs.push_back("confidence.pgm");
      outputs.push_back("confidence.f64");
      outputs.push_back("confidence.f64.json");
    }
  } else {
    std::vector<std::array<double, 2>> pts;
    try {
      pts = oemdec::io::read_cores_csv(a.points_path);
    } catch (const oemdec::io::IoError& e) {
      throw UsageError(e.what());
    }
    const int m = static_cast<int>(pts.size());
    std::vector<double> xs(m), ys(m), mean(m), variance(m);
    for (int i = 0; i < m; ++i) {
      xs[i] = pts[i][0];
      ys[i] = pts[i][1];
    }
    check(oemdec_gp_interpolate_points(map.get(), x_hat.data(), n, a.gamma2, a.ell, a.kappa,
                                       a.jitter, xs.data(), ys.data(), m, mean.data(),
                                       variance.data()),
          "gp interpolation");
    std::vector<std::string> header = {"x", "y", "mean", "variance"};
    std::vector<double> hw;
    if (a.confidence > 0.0) {
      hw.resize(m);
      check(oemdec_confidence_half_width(variance.data(), m, a.confidence, hw.data()),
            "confidence half-width");
      header.push_back("half_width");
    }
    std::vector<std::vector<std::string>> rows;
    for (int i = 0; i < m; ++i) {
      std::vector<std::string> row = {
          oemdec::io::format_double(xs[i]), oemdec::io::format_double(ys[i]),
          oemdec::io::format_double(mean[i]), oemdec::io::format_double(variance[i])};
      if (a.confidence > 0.0) row.push_back(oemdec::io::format_double(hw[i]));
      rows.push_back(std::move(row));
    }
    oemdec::io::write_csv(join_path(a.out_dir, "points.csv"), header, rows);
    outputs = {"points.csv"};
  }

  json params;
  params["xhat"] = a.xhat_path;
  params["cores"] = a.cores;
  params["ell"] = a.ell;
  params["kappa"] = a.kappa;
  params["gamma2"] = a.gamma2;
  params["jitter"] = a.jitter;
  params["width"] = a.width;
  params["height"] = a.height;
  params["points"] = a.points_path;
  params["confidence"] = a.confidence;
  write_manifest(a.out_dir, "interpolate", params, outputs);
}

}  // namespace

void register_cmd_interpolate(CLI::App& app) {
  auto args = std::make_shared<InterpolateArgs>();
  CLI::App* sub = app.add_subcommand(
      "interpolate", "GP interpolation of core intensities onto the pixel grid");
  sub->add_option("--config", args->config_path, "JSON config or an emitted manifest");
  sub->add_option("--xhat", args->xhat_path, "Restored intensities CSV");
  sub->add_option("--cores", args->cores, "Core map CSV");
  sub->add_option("--ell", args->ell, "Covariance length scale")->capture_default_str();
  sub->add_option("--kappa", args->kappa, "Covariance exponent")->capture_default_str();
  sub->add_option("--gamma2", args->gamma2, "Intensity scale gamma^2 (required)");
  sub->add_option("--jitter", args->jitter, "Numerical jitter")->capture_default_str();
  sub->add_option("--width", args->width, "Output grid width");
  sub->add_option("--height", args->height, "Output grid height");
  sub->add_option("--points", args->points_path, "Evaluate at CSV points instead of a grid");
  sub->add_option("--confidence", args->confidence,
                  "Also emit confidence half-widths at this level, e.g. 0.95");
  sub->add_option("--out", args->out_dir, "Output directory")->required();
  sub->callback([args, sub]() { run(*args, *sub); });
}

}  // namespace cli
