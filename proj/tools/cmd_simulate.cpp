#include "cli_common.hpp"
#include "io/pgm.hpp"
#include "io/tables.hpp"

namespace cli {

namespace {

struct SimulateArgs {
  std::string config_path;
  std::string ref;
  std::string cores;
  bool hex_lattice = false;
  double spacing = 3.3;
  double margin = 5.0;
  double hex_jitter = 0.0;
  double sigma2_h = 10.0;
  double sigma2_c = 2.0;
  double sigma2_n = 0.0;
  std::string extract = "max";
  uint64_t seed = 0;
  std::string out_dir;
};

void run(SimulateArgs& a, const CLI::App& sub) {
  json cfg;
  if (!a.config_path.empty()) cfg = load_config(a.config_path);
  const ConfigMerge merge(a.config_path.empty() ? nullptr : &cfg);
  merge("ref", sub.get_option("--ref"), a.ref);
  merge("cores", sub.get_option("--cores"), a.cores);
  merge("hex_lattice", sub.get_option("--hex-lattice"), a.hex_lattice);
  merge("spacing", sub.get_option("--spacing"), a.spacing);
  merge("margin", sub.get_option("--margin"), a.margin);
  merge("hex_jitter", sub.get_option("--hex-jitter"), a.hex_jitter);
  merge("sigma2_h", sub.get_option("--sigma2-h"), a.sigma2_h);
  merge("sigma2_c", sub.get_option("--sigma2-c"), a.sigma2_c);
  merge("sigma2_n", sub.get_option("--sigma2-n"), a.sigma2_n);
  merge("extract", sub.get_option("--extract"), a.extract);
  merge("seed", sub.get_option("--seed"), a.seed);
  if (sub.get_option("--seed")->count() == 0 && !(cfg.contains("seed"))) a.seed = fresh_seed();

  if (a.ref.empty()) throw UsageError("--ref is required");
  if (a.cores.empty() && !a.hex_lattice)
    throw UsageError("either --cores or --hex-lattice is required");
  if (a.extract != "max" && a.extract != "value")
    throw UsageError("--extract must be 'max' or 'value'");

  const LoadedImage ref = load_image(a.ref);

  CoreMapPtr map;
  if (!a.cores.empty()) {
    map = cores_from_csv(a.cores, ref.width, ref.height);
  } else {
    oemdec_core_map* raw = nullptr;
    check(oemdec_core_map_hex_lattice(ref.width, ref.height, a.spacing, a.margin,
                                      a.hex_jitter, a.seed, &raw),
          "hex lattice");
    map.reset(raw);
  }
  const int n = oemdec_core_map_count(map.get());

  oemdec_sim_config sim;
  oemdec_sim_config_init(&sim);
  sim.sigma2_h = a.sigma2_h;
  sim.sigma2_c = a.sigma2_c;
  sim.sigma2_n = a.sigma2_n;
  sim.rng_seed = a.seed;
  sim.use_core_value = a.extract == "value" ? 1 : 0;

  std::vector<double> g(static_cast<size_t>(ref.width) * ref.height), y(n), x_true(n);
  check(oemdec_simulate(ref.data.data(), ref.width, ref.height, map.get(), &sim, g.data(),
                        y.data(), x_true.data()),
        "simulate");

  ensure_out_dir(a.out_dir);
  oemdec::io::write_pgm_preview(join_path(a.out_dir, "g.pgm"), ref.width, ref.height,
                                g.data());
  oemdec::io::write_raw_f64(join_path(a.out_dir, "g.f64"), ref.width, ref.height, g.data());
  oemdec::io::write_values_csv(join_path(a.out_dir, "y.csv"), y.data(), y.size());
  oemdec::io::write_values_csv(join_path(a.out_dir, "x_true.csv"), x_true.data(),
                               x_true.size());
  oemdec::io::write_cores_csv(join_path(a.out_dir, "cores.csv"), map_positions(map.get()));

  json params;
  params["ref"] = a.ref;
  params["cores"] = a.cores;
  params["hex_lattice"] = a.hex_lattice;
  params["spacing"] = a.spacing;
  params["margin"] = a.margin;
  params["hex_jitter"] = a.hex_jitter;
  params["sigma2_h"] = a.sigma2_h;
  params["sigma2_c"] = a.sigma2_c;
  params["sigma2_n"] = a.sigma2_n;
  params["extract"] = a.extract;
  params["seed"] = a.seed;
  write_manifest(a.out_dir, "simulate", params,
                 {"g.pgm", "g.f64", "g.f64.json", "y.csv", "x_true.csv", "cores.csv"});
}

}  // namespace

void register_cmd_simulate(CLI::App& app) {
  auto args = std::make_shared<SimulateArgs>();
  CLI::App* sub =
      app.add_subcommand("simulate", "Synthesize a system image from a reference image");
  sub->add_option("--config", args->config_path,
                  "JSON config or a manifest emitted by an earlier run");
  sub->add_option("--ref", args->ref, "Reference image (binary PGM)");
  sub->add_option("--cores", args->cores, "Core map CSV (x,y header)");
  sub->add_flag("--hex-lattice", args->hex_lattice,
                "Generate a hexagonal core lattice instead of --cores");
  sub->add_option("--spacing", args->spacing, "Hex lattice spacing in pixels")
      ->capture_default_str();
  sub->add_option("--margin", args->margin, "Hex lattice margin in pixels")
      ->capture_default_str();
  sub->add_option("--hex-jitter", args->hex_jitter, "Uniform jitter of hex cores in pixels")
      ->capture_default_str();
  sub->add_option("--sigma2-h", args->sigma2_h, "Coupling kernel width")
      ->capture_default_str();
  sub->add_option("--sigma2-c", args->sigma2_c, "Spatial blur variance")
      ->capture_default_str();
  sub->add_option("--sigma2-n", args->sigma2_n, "Pixel noise variance")
      ->capture_default_str();
  sub->add_option("--extract", args->extract, "Per-core extraction: max or value")
      ->capture_default_str();
  sub->add_option("--seed", args->seed, "RNG seed (generated and recorded if omitted)");
  sub->add_option("--out", args->out_dir, "Output directory")->required();
  sub->callback([args, sub]() { run(*args, *sub); });
}

}  // namespace cli
