// Copyright 2026 The wrench-twin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wrench_twin/dataset_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "wrench_twin/errors.hpp"

namespace wrench_twin
{

namespace
{

constexpr std::array<const char *, 20> kColumns = {
  "t", "q3", "q4", "q5", "q6", "q7", "mg", "n1", "n2", "n3", "n4", "n5", "n6",
  "fx", "fy", "fz", "mx", "my", "mz", "cycle"};

std::vector<std::string> split_line(const std::string & line)
{
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) {
      cell.pop_back();
    }
    while (!cell.empty() && cell.front() == ' ') {
      cell.erase(cell.begin());
    }
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string & s, std::size_t line, const char * column)
{
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw SchemaError(
            "line " + std::to_string(line) + ", column '" + column + "': bad number '" + s + "'");
  }
  return v;
}

}  // namespace

std::string format_double(double v)
{
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

void write_csv(std::ostream & os, const Dataset & d)
{
  os << kCsvHeader << '\n';
  for (const Record & r : d.rows) {
    const double cells[19] = {
      r.t, r.q3, r.q4, r.q5, r.q6, r.q7, 1e3 * r.m_g,
      r.n(0), r.n(1), r.n(2), r.n(3), r.n(4), r.n(5),
      r.wrench(0), r.wrench(1), r.wrench(2),
      1e3 * r.wrench(3), 1e3 * r.wrench(4), 1e3 * r.wrench(5)};
    for (double c : cells) {
      os << format_double(c) << ',';
    }
    os << r.cycle << '\n';
  }
}

void write_csv(const std::string & path, const Dataset & d)
{
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    throw ConfigError(path, "cannot open for writing");
  }
  write_csv(f, d);
  if (!f) {
    throw ConfigError(path, "write failed");
  }
}

Dataset read_csv(std::istream & is)
{
  std::string line;
  if (!std::getline(is, line)) {
    throw SchemaError("empty dataset file: missing header");
  }
  const std::vector<std::string> header = split_line(line);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < header.size(); ++i) {
    index[header[i]] = i;
  }
  std::array<std::size_t, kColumns.size()> col{};
  std::string missing;
  for (std::size_t k = 0; k < kColumns.size(); ++k) {
    const auto it = index.find(kColumns[k]);
    if (it == index.end()) {
      missing += missing.empty() ? "" : ", ";
      missing += kColumns[k];
    } else {
      col[k] = it->second;
    }
  }
  if (!missing.empty()) {
    throw SchemaError("dataset is missing columns: " + missing);
  }

  Dataset d;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") {
      continue;
    }
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw SchemaError(
              "line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
              " cells, got " + std::to_string(cells.size()));
    }
    double v[kColumns.size()];
    for (std::size_t k = 0; k < kColumns.size(); ++k) {
      v[k] = parse_double(cells[col[k]], line_no, kColumns[k]);
    }
    Record r;
    r.t = v[0];
    r.q3 = v[1];
    r.q4 = v[2];
    r.q5 = v[3];
    r.q6 = v[4];
    r.q7 = v[5];
    r.m_g = 1e-3 * v[6];
    for (int i = 0; i < 6; ++i) {
      r.n(i) = v[7 + i];
    }
    r.wrench << v[13], v[14], v[15], 1e-3 * v[16], 1e-3 * v[17], 1e-3 * v[18];
    r.cycle = static_cast<int>(v[19]);
    if (r.cycle != v[19] || r.cycle < 1) {
      throw SchemaError("line " + std::to_string(line_no) + ": cycle must be a positive integer");
    }
    if (!d.rows.empty() && r.t < d.rows.back().t) {
      throw SchemaError("line " + std::to_string(line_no) + ": timestamps must be monotone");
    }
    d.rows.push_back(r);
  }
  if (d.rows.size() >= 2 && d.rows[1].t > d.rows[0].t) {
    d.sample_rate = std::round(1e6 / (d.rows[1].t - d.rows[0].t)) / 1e6;
  }
  return d;
}

Dataset read_csv(const std::string & path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f) {
    throw ConfigError(path, "cannot open dataset");
  }
  return read_csv(f);
}

}  // namespace wrench_twin
