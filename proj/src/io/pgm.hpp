#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace oemdec::io {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Binary PGM (P5). Samples are 1 byte up to maxval 255, otherwise 2 bytes
// big-endian, per the format specification.
struct PgmImage {
  int width = 0;
  int height = 0;
  int maxval = 255;
  std::vector<uint16_t> samples;  // row-major
};

PgmImage read_pgm(const std::string& path);
void write_pgm(const std::string& path, const PgmImage& image);

// Preview writer: min-max scales doubles into the full 16-bit range.
void write_pgm_preview(const std::string& path, int width, int height, const double* data);

// Raw float64 little-endian dump with a JSON sidecar
// {"width":W,"height":H,"dtype":"f64le"} at path + ".json".
void write_raw_f64(const std::string& path, int width, int height, const double* data);
std::vector<double> read_raw_f64(const std::string& path, int& width, int& height);

}  // namespace oemdec::io
