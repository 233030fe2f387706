#pragma once

#include <CLI11.hpp>
#include <array>
#include <memory>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

#include "oemdec.h"

namespace cli {

using json = nlohmann::ordered_json;

// Exit code 2: bad flags or unreadable inputs. Exit code 3: numerical failure.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RunError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Maps C-API failures onto the exit-code exceptions above.
void check(oemdec_status status, const std::string& context);

// Reads a JSON config; an emitted manifest (with a "params" object) works too.
json load_config(const std::string& path);

// After parsing, fills in values the user did not pass on the command line.
class ConfigMerge {
 public:
  explicit ConfigMerge(const json* cfg) : cfg_(cfg) {}

  template <typename T>
  void operator()(const std::string& key, const CLI::Option* opt, T& value) const {
    if (cfg_ && opt->count() == 0 && cfg_->contains(key)) value = (*cfg_)[key].get<T>();
  }

 private:
  const json* cfg_;
};

uint64_t fresh_seed();

void ensure_out_dir(const std::string& dir);
std::string join_path(const std::string& dir, const std::string& name);

// Manifest: {"command":..., "version":..., "params":{...}, "outputs":[...]}.
// Rerunning a command with --config <manifest> reproduces its outputs.
void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& params, const std::vector<std::string>& outputs);

struct LoadedImage {
  int width = 0;
  int height = 0;
  std::vector<double> data;
};
LoadedImage load_image(const std::string& path);

struct CoreMapDeleter {
  void operator()(oemdec_core_map* p) const { oemdec_core_map_free(p); }
};
using CoreMapPtr = std::unique_ptr<oemdec_core_map, CoreMapDeleter>;

struct KernelDeleter {
  void operator()(oemdec_kernel* p) const { oemdec_kernel_free(p); }
};
using KernelPtr = std::unique_ptr<oemdec_kernel, KernelDeleter>;

struct CovarianceDeleter {
  void operator()(oemdec_covariance* p) const { oemdec_covariance_free(p); }
};
using CovariancePtr = std::unique_ptr<oemdec_covariance, CovarianceDeleter>;

struct ResultDeleter {
  void operator()(oemdec_result* p) const { oemdec_result_free(p); }
};
using ResultPtr = std::unique_ptr<oemdec_result, ResultDeleter>;

// Core map from a CSV; grid dimensions derived from the data unless given.
CoreMapPtr cores_from_csv(const std::string& path, int width = 0, int height = 0);
std::vector<std::array<double, 2>> map_positions(const oemdec_core_map* map);

// "start:stop:step" into an inclusive list.
std::vector<double> parse_grid(const std::string& spec);

void register_cmd_simulate(CLI::App& app);
void register_cmd_deconvolve(CLI::App& app);
void register_cmd_interpolate(CLI::App& app);
void register_cmd_calibrate(CLI::App& app);
void register_cmd_sweep(CLI::App& app);
void register_cmd_phantom(CLI::App& app);

}  // namespace cli
