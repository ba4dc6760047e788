#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "maxid/errors.hpp"

namespace maxid {

// Shortest round-trip decimal representation of a double.
inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// CSV with header `site_1,...,site_N`, one row per replicate, '.' decimal.
inline void write_matrix_csv(const std::filesystem::path& path,
                             const Eigen::MatrixXd& m,
                             const std::string& col_prefix = "site_") {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  for (int c = 0; c < m.cols(); ++c) {
    if (c) out << ',';
    out << col_prefix << (c + 1);
  }
  out << '\n';
  char buf[32];
  std::string line;
  for (long r = 0; r < m.rows(); ++r) {
    line.clear();
    for (int c = 0; c < m.cols(); ++c) {
      if (c) line += ',';
      std::snprintf(buf, sizeof(buf), "%.17g", m(r, c));
      line += buf;
    }
    line += '\n';
    out << line;
  }
  if (!out) throw Error("write failed: " + path.string());
}

inline Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingSamples("cannot open samples file: " + path.string());
  std::string header;
  if (!std::getline(in, header)) {
    throw MissingSamples("empty samples file: " + path.string());
  }
  int cols = 1;
  for (char ch : header) cols += ch == ',';
  std::vector<double> values;
  std::string line;
  long rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const char* p = line.c_str();
    char* end = nullptr;
    for (int c = 0; c < cols; ++c) {
      const double v = std::strtod(p, &end);
      if (end == p) {
        throw MissingSamples("malformed row in " + path.string());
      }
      values.push_back(v);
      p = end;
      if (*p == ',') ++p;
    }
    ++rows;
  }
  if (rows == 0) throw MissingSamples("no data rows in " + path.string());
  Eigen::MatrixXd m(rows, cols);
  for (long r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) m(r, c) = values[r * cols + c];
  }
  return m;
}

inline void write_json_file(const std::filesystem::path& path,
                            const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
}

inline nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingSamples("cannot open file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw MissingSamples("bad JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

// samples.csv -> samples.meta.json
inline std::filesystem::path sidecar_path(std::filesystem::path p) {
  p.replace_extension(".meta.json");
  return p;
}

}  // namespace maxid
