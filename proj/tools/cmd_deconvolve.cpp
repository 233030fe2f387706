#include <cmath>
#include <fstream>

#include "cli_common.hpp"
#include "io/tables.hpp"

namespace cli {

namespace {

struct DeconvolveArgs {
  std::string config_path;
  std::string y_path;
  std::string cores;
  std::string method;
  double sigma2_h = 0.0;
  double alpha_h = 0.0;
  double beta_h = 0.0;
  bool row_normalize = false;
  double trunc_radius = 20.0;
  double ell = 6.0;
  double kappa = 1.0;
  double cov_jitter = 1e-8;
  uint64_t seed = 0;
  // mcmc
  int n_mc = 1500;
  int n_bi = 500;
  std::string x_sampler = "gibbs";
  // vb
  int max_iters = 500;
  double epsilon_scale = 1e-5;
  bool literal_residual = false;
  bool full_qx = false;
  // admm
  double lambda = -1.0;
  bool lambda_sweep = false;
  std::vector<double> lambda_grid;
  double mu = 1.0;
  int admm_iters = 2000;
  std::string x_true_path;
  std::string out_dir;
};

void run(DeconvolveArgs& a, const CLI::App& sub) {
  json cfg;
  if (!a.config_path.empty()) cfg = load_config(a.config_path);
  const ConfigMerge merge(a.config_path.empty() ? nullptr : &cfg);
  merge("y", sub.get_option("--y"), a.y_path);
  merge("cores", sub.get_option("--cores"), a.cores);
  merge("method", sub.get_option("--method"), a.method);
  merge("sigma2_h", sub.get_option("--sigma2-h"), a.sigma2_h);
  merge("alpha_h", sub.get_option("--alpha-h"), a.alpha_h);
  merge("beta_h", sub.get_option("--beta-h"), a.beta_h);
  merge("row_normalize", sub.get_option("--row-normalize"), a.row_normalize);
  merge("trunc_radius", sub.get_option("--trunc-radius"), a.trunc_radius);
  merge("ell", sub.get_option("--ell"), a.ell);
  merge("kappa", sub.get_option("--kappa"), a.kappa);
  merge("cov_jitter", sub.get_option("--cov-jitter"), a.cov_jitter);
  merge("seed", sub.get_option("--seed"), a.seed);
  merge("n_mc", sub.get_option("--n-mc"), a.n_mc);
  merge("n_bi", sub.get_option("--n-bi"), a.n_bi);
  merge("x_sampler", sub.get_option("--x-sampler"), a.x_sampler);
  merge("max_iters", sub.get_option("--max-iters"), a.max_iters);
  merge("epsilon_scale", sub.get_option("--epsilon-scale"), a.epsilon_scale);
  merge("literal_residual", sub.get_option("--literal-residual"), a.literal_residual);
  merge("full_qx", sub.get_option("--full-qx"), a.full_qx);
  merge("lambda", sub.get_option("--lambda"), a.lambda);
  merge("lambda_sweep", sub.get_option("--lambda-sweep"), a.lambda_sweep);
  merge("lambda_grid", sub.get_option("--lambda-grid"), a.lambda_grid);
  merge("mu", sub.get_option("--mu"), a.mu);
  merge("admm_iters", sub.get_option("--admm-iters"), a.admm_iters);
  merge("x_true", sub.get_option("--x-true"), a.x_true_path);
  if (sub.get_option("--seed")->count() == 0 && !cfg.contains("seed")) a.seed = fresh_seed();

  if (a.y_path.empty() || a.cores.empty()) throw UsageError("--y and --cores are required");
  if (a.method != "mcmc" && a.method != "vb" && a.method != "admm")
    throw UsageError("unknown method '" + a.method + "' (mcmc, vb or admm)");
  const bool gaussian = a.sigma2_h > 0.0;
  if (!gaussian && !(a.alpha_h > 0.0 && a.beta_h > 0.0))
    throw UsageError("kernel needs --sigma2-h or both --alpha-h and --beta-h");

  std::vector<double> y;
  try {
    y = oemdec::io::read_values_csv(a.y_path);
  } catch (const oemdec::io::IoError& e) {
    throw UsageError(e.what());
  }
  CoreMapPtr map = cores_from_csv(a.cores);
  const int n = oemdec_core_map_count(map.get());
  if (static_cast<int>(y.size()) != n)
    throw UsageError("y length does not match the core count");

  oemdec_kernel_params kp;
  if (gaussian)
    oemdec_kernel_params_gaussian(&kp, a.sigma2_h);
  else
    oemdec_kernel_params_init(&kp);
  if (!gaussian) {
    kp.alpha_h = a.alpha_h;
    kp.beta_h = a.beta_h;
  }
  kp.truncation_radius = a.trunc_radius;
  kp.row_normalize = a.row_normalize ? 1 : 0;
  oemdec_kernel* kraw = nullptr;
  check(oemdec_kernel_build(map.get(), &kp, &kraw), "kernel build");
  KernelPtr kernel(kraw);

  oemdec_covariance* craw = nullptr;
  check(oemdec_covariance_build(map.get(), a.ell, a.kappa, a.cov_jitter, &craw),
        "covariance build");
  CovariancePtr cov(craw);

  ResultPtr result;
  json sweep_rows = json::array();
  if (a.method == "mcmc") {
    oemdec_mcmc_config mc;
    oemdec_mcmc_config_init(&mc);
    mc.n_mc = a.n_mc;
    mc.n_bi = a.n_bi;
    mc.rng_seed = a.seed;
    if (a.x_sampler == "hmc")
      mc.use_exact_hmc = 1;
    else if (a.x_sampler != "gibbs")
      throw UsageError("--x-sampler must be 'gibbs' or 'hmc'");
    oemdec_hyperparams h;
    oemdec_hyperparams_init(&h);
    oemdec_result* rraw = nullptr;
    check(oemdec_run_mcmc(kernel.get(), cov.get(), y.data(), n, &h, &mc, &rraw), "mcmc");
    result.reset(rraw);
  } else if (a.method == "vb") {
    oemdec_vb_config vc;
    oemdec_vb_config_init(&vc);
    vc.max_iters = a.max_iters;
    vc.epsilon_scale = a.epsilon_scale;
    vc.half_residual_factor = a.literal_residual ? 0 : 1;
    vc.degenerate_qx = a.full_qx ? 0 : 1;
    oemdec_hyperparams h;
    oemdec_hyperparams_init(&h);
    oemdec_result* rraw = nullptr;
    check(oemdec_run_vb(kernel.get(), cov.get(), y.data(), n, &h, &vc, &rraw), "vb");
    result.reset(rraw);
  } else {
    oemdec_admm_config ac;
    oemdec_admm_config_init(&ac);
    ac.mu = a.mu;
    ac.max_iters = a.admm_iters;
    ac.epsilon_scale = a.epsilon_scale;
    if (a.lambda_sweep) {
      std::vector<double> grid = a.lambda_grid;
      if (grid.empty()) {
        grid.resize(5);
        check(oemdec_default_lambda_grid(kernel.get(), cov.get(), grid.data()),
              "lambda grid");
      }
      std::vector<double> x_true;
      if (!a.x_true_path.empty()) {
        try {
          x_true = oemdec::io::read_values_csv(a.x_true_path);
        } catch (const oemdec::io::IoError& e) {
          throw UsageError(e.what());
        }
        if (static_cast<int>(x_true.size()) != n)
          throw UsageError("x_true length does not match the core count");
      }
      std::vector<double> rmses(grid.size(), std::nan(""));
      oemdec_result* rraw = nullptr;
      check(oemdec_run_admm_sweep(kernel.get(), cov.get(), y.data(), n, grid.data(),
                                  static_cast<int>(grid.size()),
                                  x_true.empty() ? nullptr : x_true.data(), &ac,
                                  rmses.data(), &rraw),
            "admm sweep");
      result.reset(rraw);
      for (size_t i = 0; i < grid.size(); ++i) {
        json row;
        row["lambda"] = grid[i];
        if (!x_true.empty()) row["rmse"] = rmses[i];
        sweep_rows.push_back(row);
      }
    } else {
      if (!(a.lambda >= 0.0))
        throw UsageError("--lambda is required for admm (or use --lambda-sweep)");
      ac.lambda_value = a.lambda;
      oemdec_result* rraw = nullptr;
      check(oemdec_run_admm(kernel.get(), cov.get(), y.data(), n, &ac, &rraw), "admm");
      result.reset(rraw);
    }
  }

  ensure_out_dir(a.out_dir);
  oemdec::io::write_values_csv(join_path(a.out_dir, "xhat.csv"), oemdec_result_x(result.get()),
                               static_cast<size_t>(oemdec_result_size(result.get())));

  auto json_or_null = [](double v) {
    return std::isnan(v) ? json(nullptr) : json(v);
  };
  json estimates;
  estimates["sigma2"] = json_or_null(oemdec_result_sigma2(result.get()));
  estimates["gamma2"] = json_or_null(oemdec_result_gamma2(result.get()));
  estimates["beta"] = json_or_null(oemdec_result_beta(result.get()));
  estimates["lambda"] = json_or_null(oemdec_result_lambda(result.get()));
  {
    std::ofstream out(join_path(a.out_dir, "estimates.json"), std::ios::binary);
    out << estimates.dump(2) << "\n";
  }
  json diagnostics;
  diagnostics["method"] = oemdec_result_method(result.get());
  diagnostics["iterations"] = oemdec_result_iterations(result.get());
  diagnostics["converged"] = oemdec_result_converged(result.get()) != 0;
  diagnostics["wall_time_s"] = oemdec_result_wall_time(result.get());
  if (!sweep_rows.empty()) diagnostics["lambda_sweep"] = sweep_rows;
  {
    std::ofstream out(join_path(a.out_dir, "diagnostics.json"), std::ios::binary);
    out << diagnostics.dump(2) << "\n";
  }

  json params;
  params["y"] = a.y_path;
  params["cores"] = a.cores;
  params["method"] = a.method;
  params["sigma2_h"] = a.sigma2_h;
  params["alpha_h"] = a.alpha_h;
  params["beta_h"] = a.beta_h;
  params["row_normalize"] = a.row_normalize;
  params["trunc_radius"] = a.trunc_radius;
  params["ell"] = a.ell;
  params["kappa"] = a.kappa;
  params["cov_jitter"] = a.cov_jitter;
  params["seed"] = a.seed;
  params["n_mc"] = a.n_mc;
  params["n_bi"] = a.n_bi;
  params["x_sampler"] = a.x_sampler;
  params["max_iters"] = a.max_iters;
  params["epsilon_scale"] = a.epsilon_scale;
  params["literal_residual"] = a.literal_residual;
  params["full_qx"] = a.full_qx;
  params["lambda"] = a.lambda;
  params["lambda_sweep"] = a.lambda_sweep;
  params["lambda_grid"] = a.lambda_grid;
  params["mu"] = a.mu;
  params["admm_iters"] = a.admm_iters;
  params["x_true"] = a.x_true_path;
  write_manifest(a.out_dir, "deconvolve", params,
                 {"xhat.csv", "estimates.json", "diagnostics.json"});
}

}  // namespace

void register_cmd_deconvolve(CLI::App& app) {
  auto args = std::make_shared<DeconvolveArgs>();
  CLI::App* sub = app.add_subcommand("deconvolve", "Restore core intensities from y");
  sub->add_option("--config", args->config_path, "JSON config or an emitted manifest");
  sub->add_option("--y", args->y_path, "Observed core intensities CSV");
  sub->add_option("--cores", args->cores, "Core map CSV");
  sub->add_option("--method", args->method, "mcmc, vb or admm");
  sub->add_option("--sigma2-h", args->sigma2_h, "Gaussian coupling width");
  sub->add_option("--alpha-h", args->alpha_h, "Generalized-Gaussian alpha");
  sub->add_option("--beta-h", args->beta_h, "Generalized-Gaussian beta");
  sub->add_flag("--row-normalize", args->row_normalize, "Normalize kernel rows to sum 1");
  sub->add_option("--trunc-radius", args->trunc_radius, "Kernel truncation radius (px)")
      ->capture_default_str();
  sub->add_option("--ell", args->ell, "Prior covariance length scale")
      ->capture_default_str();
  sub->add_option("--kappa", args->kappa, "Prior covariance exponent")
      ->capture_default_str();
  sub->add_option("--cov-jitter", args->cov_jitter, "Covariance diagonal jitter")
      ->capture_default_str();
  sub->add_option("--seed", args->seed, "RNG seed (mcmc)");
  sub->add_option("--n-mc", args->n_mc, "Gibbs iterations")->capture_default_str();
  sub->add_option("--n-bi", args->n_bi, "Burn-in iterations")->capture_default_str();
  sub->add_option("--x-sampler", args->x_sampler, "x step: gibbs or hmc")
      ->capture_default_str();
  sub->add_option("--max-iters", args->max_iters, "VB iteration cap")->capture_default_str();
  sub->add_option("--epsilon-scale", args->epsilon_scale,
                  "Stopping threshold scale (VB and ADMM)")
      ->capture_default_str();
  sub->add_flag("--literal-residual", args->literal_residual,
                "VB: drop the 1/2 on the residual (published form)");
  sub->add_flag("--full-qx", args->full_qx, "VB: materialize the covariance of q(x)");
  sub->add_option("--lambda", args->lambda, "ADMM regularization sigma^2/gamma^2");
  sub->add_flag("--lambda-sweep", args->lambda_sweep, "ADMM: run the 5-point lambda grid");
  sub->add_option("--lambda-grid", args->lambda_grid, "ADMM: explicit lambda grid")
      ->delimiter(',');
  sub->add_option("--mu", args->mu, "ADMM penalty")->capture_default_str();
  sub->add_option("--admm-iters", args->admm_iters, "ADMM iteration cap")
      ->capture_default_str();
  sub->add_option("--x-true", args->x_true_path,
                  "Ground-truth CSV for lambda-sweep RMSE selection");
  sub->add_option("--out", args->out_dir, "Output directory")->required();
  sub->callback([args, sub]() { run(*args, *sub); });
}

}  // namespace cli
