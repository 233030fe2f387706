#include "io/pgm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

namespace oemdec::io {

namespace {

int next_header_int(std::istream& in) {
  // Skips whitespace and '#' comment lines between header tokens.
  while (true) {
    const int c = in.peek();
    if (c == EOF) throw IoError("pgm: truncated header");
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(c)) {
      in.get();
      continue;
    }
    break;
  }
  int value = 0;
  if (!(in >> value)) throw IoError("pgm: malformed header");
  return value;
}

}  // namespace

PgmImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5') throw IoError("pgm: not a binary P5 file: " + path);
  PgmImage img;
  img.width = next_header_int(in);
  img.height = next_header_int(in);
  img.maxval = next_header_int(in);
  if (img.width <= 0 || img.height <= 0 || img.maxval <= 0 || img.maxval > 65535)
    throw IoError("pgm: invalid dimensions or maxval in " + path);
  in.get();  // single whitespace after maxval
  const size_t count = static_cast<size_t>(img.width) * img.height;
  img.samples.resize(count);
  if (img.maxval <= 255) {
    std::vector<unsigned char> raw(count);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count));
    if (static_cast<size_t>(in.gcount()) != count) throw IoError("pgm: truncated data");
    for (size_t i = 0; i < count; ++i) img.samples[i] = raw[i];
  } else {
    std::vector<unsigned char> raw(count * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(count * 2));
    if (static_cast<size_t>(in.gcount()) != count * 2) throw IoError("pgm: truncated data");
    for (size_t i = 0; i < count; ++i)
      img.samples[i] = static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  }
  return img;
}

void write_pgm(const std::string& path, const PgmImage& image) {
  if (image.width <= 0 || image.height <= 0 || image.maxval <= 0 || image.maxval > 65535)
    throw IoError("pgm: invalid image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P5\n" << image.width << " " << image.height << "\n" << image.maxval << "\n";
  const size_t count = static_cast<size_t>(image.width) * image.height;
  if (image.samples.size() != count) throw IoError("pgm: sample count mismatch");
  if (image.maxval <= 255) {
    std::vector<unsigned char> raw(count);
    for (size_t i = 0; i < count; ++i)
      raw[i] = static_cast<unsigned char>(std::min<int>(image.samples[i], 255));
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(count));
  } else {
    std::vector<unsigned char> raw(count * 2);
    for (size_t i = 0; i < count; ++i) {
      raw[2 * i] = static_cast<unsigned char>(image.samples[i] >> 8);
      raw[2 * i + 1] = static_cast<unsigned char>(image.samples[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(count * 2));
  }
  if (!out) throw IoError("short write to " + path);
}

void write_pgm_preview(const std::string& path, int width, int height, const double* data) {
  const size_t count = static_cast<size_t>(width) * height;
  double lo = data[0], hi = data[0];
  for (size_t i = 1; i < count; ++i) {
    lo = std::min(lo, data[i]);
    hi = std::max(hi, data[i]);
  }
  PgmImage img;
  img.width = width;
  img.height = height;
  img.maxval = 65535;
  img.samples.resize(count, 0);
  if (hi > lo) {
    const double scale = 65535.0 / (hi - lo);
    for (size_t i = 0; i < count; ++i)
      img.samples[i] = static_cast<uint16_t>(
          std::clamp(std::lround((data[i] - lo) * scale), 0L, 65535L));
  }
  write_pgm(path, img);
}

void write_raw_f64(const std::string& path, int width, int height, const double* data) {
  static_assert(sizeof(double) == 8);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  // Little-endian hosts dump directly; this project only targets such hosts.
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(sizeof(double) * width * height));
  if (!out) throw IoError("short write to " + path);
  nlohmann::ordered_json sidecar;
  sidecar["width"] = width;
  sidecar["height"] = height;
  sidecar["dtype"] = "f64le";
  std::ofstream side(path + ".json");
  if (!side) throw IoError("cannot write " + path + ".json");
  side << sidecar.dump(2) << "\n";
}

std::vector<double> read_raw_f64(const std::string& path, int& width, int& height) {
  std::ifstream side(path + ".json");
  if (!side) throw IoError("cannot open " + path + ".json");
  nlohmann::json sidecar = nlohmann::json::parse(side);
  width = sidecar.at("width").get<int>();
  height = sidecar.at("height").get<int>();
  if (sidecar.at("dtype").get<std::string>() != "f64le")
    throw IoError("unsupported dtype in " + path + ".json");
  std::vector<double> data(static_cast<size_t>(width) * height);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(sizeof(double) * data.size()));
  if (static_cast<size_t>(in.gcount()) != sizeof(double) * data.size())
    throw IoError("truncated raw data in " + path);
  return data;
}

}  // namespace oemdec::io
