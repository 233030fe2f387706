#include <fstream>

#include "cli_common.hpp"
#include "io/tables.hpp"

namespace cli {

namespace {

struct CalibrateArgs {
  std::string config_path;
  std::string background;
  std::vector<std::string> train;
  double min_separation = 2.0;
  double floor = 0.5;
  std::string ell_grid = "1:20:1";
  std::string kappa_grid = "0.25:2.0:0.25";
  double fit_jitter = 1e-8;
  std::string out_dir;
};

void run(CalibrateArgs& a, const CLI::App& sub) {
  json cfg;
  if (!a.config_path.empty()) cfg = load_config(a.config_path);
  const ConfigMerge merge(a.config_path.empty() ? nullptr : &cfg);
  merge("background", sub.get_option("--background"), a.background);
  merge("train", sub.get_option("--train"), a.train);
  merge("min_separation", sub.get_option("--min-separation"), a.min_separation);
  merge("floor", sub.get_option("--floor"), a.floor);
  merge("ell_grid", sub.get_option("--ell-grid"), a.ell_grid);
  merge("kappa_grid", sub.get_option("--kappa-grid"), a.kappa_grid);
  merge("fit_jitter", sub.get_option("--fit-jitter"), a.fit_jitter);

  if (a.background.empty()) throw UsageError("--background is required");

  const LoadedImage bg = load_image(a.background);
  oemdec_core_map* raw = nullptr;
  const oemdec_status st = oemdec_core_map_detect(bg.data.data(), bg.width, bg.height,
                                                  a.min_separation, a.floor, &raw);
  if (st != OEMDEC_OK) throw RunError(std::string("core detection: ") + oemdec_last_error());
  CoreMapPtr map(raw);
  const int n = oemdec_core_map_count(map.get());

  ensure_out_dir(a.out_dir);
  oemdec::io::write_cores_csv(join_path(a.out_dir, "cores.csv"), map_positions(map.get()));
  std::vector<std::string> outputs = {"cores.csv"};

  json fit;
  if (!a.train.empty()) {
    std::vector<double> fields(static_cast<size_t>(a.train.size()) * n);
    for (size_t f = 0; f < a.train.size(); ++f) {
      const LoadedImage img = load_image(a.train[f]);
      check(oemdec_subsample_reference(img.data.data(), img.width, img.height, map.get(),
                                       fields.data() + f * n),
            "sampling training image " + a.train[f]);
    }
    const std::vector<double> ells = parse_grid(a.ell_grid);
    const std::vector<double> kappas = parse_grid(a.kappa_grid);
    double ell = 0.0, kappa = 0.0;
    check(oemdec_fit_covariance(map.get(), fields.data(), static_cast<int>(a.train.size()),
                                ells.data(), static_cast<int>(ells.size()), kappas.data(),
                                static_cast<int>(kappas.size()), a.fit_jitter, &ell, &kappa),
          "covariance fit");
    fit["ell"] = ell;
    fit["kappa"] = kappa;
    fit["n_train"] = a.train.size();
    std::ofstream out(join_path(a.out_dir, "fit.json"), std::ios::binary);
    out << fit.dump(2) << "\n";
    outputs.push_back("fit.json");
  }

  json params;
  params["background"] = a.background;
  params["train"] = a.train;
  params["min_separation"] = a.min_separation;
  params["floor"] = a.floor;
  params["ell_grid"] = a.ell_grid;
  params["kappa_grid"] = a.kappa_grid;
  params["fit_jitter"] = a.fit_jitter;
  write_manifest(a.out_dir, "calibrate", params, outputs);
}

}  // namespace

void register_cmd_calibrate(CLI::App& app) {
  auto args = std::make_shared<CalibrateArgs>();
  CLI::App* sub = app.add_subcommand(
      "calibrate", "Detect core centers and fit the prior covariance parameters");
  sub->add_option("--config", args->config_path, "JSON config or an emitted manifest");
  sub->add_option("--background", args->background, "Calibration background image (PGM)");
  sub->add_option("--train", args->train,
                  "Training image(s) for the (ell,kappa) fit; repeatable");
  sub->add_option("--min-separation", args->min_separation,
                  "Minimum distance between detected cores (px)")
      ->capture_default_str();
  sub->add_option("--floor", args->floor, "Detection threshold as a fraction of the max")
      ->capture_default_str();
  sub->add_option("--ell-grid", args->ell_grid, "Length-scale grid start:stop:step")
      ->capture_default_str();
  sub->add_option("--kappa-grid", args->kappa_grid, "Exponent grid start:stop:step")
      ->capture_default_str();
  sub->add_option("--fit-jitter", args->fit_jitter, "Covariance jitter during the fit")
      ->capture_default_str();
  sub->add_option("--out", args->out_dir, "Output directory")->required();
  sub->callback([args, sub]() { run(*args, *sub); });
}

}  // namespace cli
