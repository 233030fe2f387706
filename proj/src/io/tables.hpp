#pragma once

#include <array>
#include <string>
#include <vector>

#include "io/pgm.hpp"  // IoError

namespace oemdec::io {

// Full-precision, round-trip-exact double formatting ("%.17g").
std::string format_double(double v);

// Core map CSV: header "x,y", one row per core, 0-based pixel coordinates.
void write_cores_csv(const std::string& path, const std::vector<std::array<double, 2>>& pts);
std::vector<std::array<double, 2>> read_cores_csv(const std::string& path);

// Single-column CSV with header "value".
void write_values_csv(const std::string& path, const double* values, size_t count);
std::vector<double> read_values_csv(const std::string& path);

// Generic CSV writer with LF line endings.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace oemdec::io
