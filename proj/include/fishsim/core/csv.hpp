// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The FishSim Authors

#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "fishsim/core/types.hpp"

namespace fishsim {

/// Formats a double with 17 significant digits so that the decimal
/// text round-trips to the identical bit pattern.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Incremental CSV writer. The header is written on construction and
/// every row is flushed immediately, so a truncated file is always a
/// valid prefix of the full one.
class CsvWriter {
public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : path_(path), n_cols_(columns.size()) {
    out_.open(path);
    if (!out_) throw InputError("cannot open CSV for writing: " + path);
    for (size_t i = 0; i < columns.size(); ++i) {
      if (i) out_ << ',';
      out_ << columns[i];
    }
    out_ << '\n';
    out_.flush();
    check();
  }

  void write_row(const std::vector<double>& values) {
    if (values.size() != n_cols_) {
      throw InputError("CSV row has " + std::to_string(values.size()) +
                       " values, header has " + std::to_string(n_cols_));
    }
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_full(values[i]);
    }
    out_ << '\n';
    out_.flush();
    check();
  }

  const std::string& path() const { return path_; }

private:
  void check() {
    if (!out_) throw InputError("write error on " + path_);
  }

  std::string path_;
  size_t n_cols_;
  std::ofstream out_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const {
    for (size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == name) return static_cast<int>(i);
    return -1;
  }

  std::vector<double> column(const std::string& name) const {
    const int idx = column_index(name);
    if (idx < 0) throw InputError("CSV has no column named " + name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[idx]);
    return out;
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open CSV: " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) return t;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) t.columns.push_back(cell);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(t.columns.size());
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    if (row.size() != t.columns.size()) {
      throw InputError("ragged CSV row in " + path);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace fishsim
