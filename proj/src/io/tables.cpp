#include "io/tables.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace oemdec::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& path) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("malformed number '" + s + "' in " + path);
  }
}

}  // namespace

void write_cores_csv(const std::string& path,
                     const std::vector<std::array<double, 2>>& pts) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "x,y\n";
  for (const auto& p : pts) out << format_double(p[0]) << "," << format_double(p[1]) << "\n";
  if (!out) throw IoError("short write to " + path);
}

std::vector<std::array<double, 2>> read_cores_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty core CSV " + path);
  std::vector<std::array<double, 2>> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cols = split_line(line);
    if (cols.size() != 2) throw IoError("expected two columns in " + path);
    pts.push_back({parse_double(cols[0], path), parse_double(cols[1], path)});
  }
  return pts;
}

void write_values_csv(const std::string& path, const double* values, size_t count) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "value\n";
  for (size_t i = 0; i < count; ++i) out << format_double(values[i]) << "\n";
  if (!out) throw IoError("short write to " + path);
}

std::vector<double> read_values_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty value CSV " + path);
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    values.push_back(parse_double(split_line(line)[0], path));
  }
  return values;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (size_t i = 0; i < header.size(); ++i)
    out << header[i] << (i + 1 < header.size() ? "," : "");
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << row[i] << (i + 1 < row.size() ? "," : "");
    out << "\n";
  }
  if (!out) throw IoError("short write to " + path);
}

}  // namespace oemdec::io
