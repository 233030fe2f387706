#include "cli_common.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "io/pgm.hpp"
#include "io/tables.hpp"

namespace cli {

void check(oemdec_status status, const std::string& context) {
  if (status == OEMDEC_OK) return;
  const std::string msg = context + ": " + oemdec_last_error();
  if (status == OEMDEC_ERR_PARAM) throw UsageError(msg);
  throw RunError(msg);
}

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config " + path);
  json parsed;
  try {
    parsed = json::parse(in);
  } catch (const std::exception& e) {
    throw UsageError("malformed JSON in " + path + ": " + e.what());
  }
  if (parsed.contains("params")) return parsed["params"];
  return parsed;
}

uint64_t fresh_seed() {
  std::random_device rd;
  return (static_cast<uint64_t>(rd()) << 32) ^ rd();
}

void ensure_out_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create output directory " + dir);
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_manifest(const std::string& out_dir, const std::string& command,
                    const json& params, const std::vector<std::string>& outputs) {
  json manifest;
  manifest["command"] = command;
  manifest["version"] = oemdec_version();
  manifest["params"] = params;
  manifest["outputs"] = outputs;
  const std::string path = join_path(out_dir, "manifest.json");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write " + path);
  out << manifest.dump(2) << "\n";
}

LoadedImage load_image(const std::string& path) {
  try {
    const oemdec::io::PgmImage pgm = oemdec::io::read_pgm(path);
    LoadedImage img;
    img.width = pgm.width;
    img.height = pgm.height;
    img.data.resize(pgm.samples.size());
    for (size_t i = 0; i < pgm.samples.size(); ++i)
      img.data[i] = static_cast<double>(pgm.samples[i]);
    return img;
  } catch (const oemdec::io::IoError& e) {
    throw UsageError(e.what());
  }
}

CoreMapPtr cores_from_csv(const std::string& path, int width, int height) {
  std::vector<std::array<double, 2>> pts;
  try {
    pts = oemdec::io::read_cores_csv(path);
  } catch (const oemdec::io::IoError& e) {
    throw UsageError(e.what());
  }
  if (pts.empty()) throw UsageError("no cores in " + path);
  std::vector<double> xs(pts.size()), ys(pts.size());
  double max_x = 0.0, max_y = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    xs[i] = pts[i][0];
    ys[i] = pts[i][1];
    max_x = std::max(max_x, xs[i]);
    max_y = std::max(max_y, ys[i]);
  }
  if (width <= 0) width = static_cast<int>(std::floor(max_x)) + 1;
  if (height <= 0) height = static_cast<int>(std::floor(max_y)) + 1;
  oemdec_core_map* raw = nullptr;
  check(oemdec_core_map_create(width, height, xs.data(), ys.data(),
                               static_cast<int>(pts.size()), &raw),
        "loading cores from " + path);
  return CoreMapPtr(raw);
}

std::vector<std::array<double, 2>> map_positions(const oemdec_core_map* map) {
  const int n = oemdec_core_map_count(map);
  std::vector<double> xs(n), ys(n);
  oemdec_core_map_positions(map, xs.data(), ys.data());
  std::vector<std::array<double, 2>> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = {xs[i], ys[i]};
  return pts;
}

std::vector<double> parse_grid(const std::string& spec) {
  double start = 0.0, stop = 0.0, step = 0.0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0.0)
    throw UsageError("grid must be start:stop:step with step > 0, got '" + spec + "'");
  std::vector<double> out;
  for (double v = start; v <= stop + 1e-12 * step; v += step) out.push_back(v);
  if (out.empty()) throw UsageError("empty grid '" + spec + "'");
  return out;
}

}  // namespace cli
