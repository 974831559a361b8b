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

#include "wrench_twin/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "wrench_twin/dataset_io.hpp"
#include "wrench_twin/errors.hpp"

namespace wrench_twin
{

namespace
{

constexpr int kReportAxis[kOutputs] = {1, 2, 4, 5, 6};
const char * const kAxisName[kOutputs] = {"fx", "fy", "mx", "my", "mz"};
const char * const kAxisUnit[kOutputs] = {"N", "N", "N*mm", "N*mm", "N*mm"};

void check_series(const Eigen::VectorXd & pred, const Eigen::VectorXd & ref)
{
  if (pred.size() != ref.size()) {
    throw MetricError("series lengths differ");
  }
  if (ref.size() < 2) {
    throw MetricError("need at least 2 samples");
  }
}

}  // namespace

double rms_error(const Eigen::VectorXd & pred, const Eigen::VectorXd & ref)
{
  check_series(pred, ref);
  return std::sqrt((pred - ref).squaredNorm() / static_cast<double>(ref.size()));
}

double nrmsd(const Eigen::VectorXd & pred, const Eigen::VectorXd & ref)
{
  const double rms = rms_error(pred, ref);
  const double range = ref.maxCoeff() - ref.minCoeff();
  if (!(range > 0.0)) {
    throw MetricError("reference series is constant: NRMSD undefined");
  }
  return rms / range;
}

double r_squared(const Eigen::VectorXd & pred, const Eigen::VectorXd & ref)
{
  check_series(pred, ref);
  const double sst = (ref.array() - ref.mean()).square().sum();
  if (!(sst > 0.0)) {
    throw MetricError("reference series is constant: R^2 undefined");
  }
  return 1.0 - (pred - ref).squaredNorm() / sst;
}

AxisMetrics axis_report(const Eigen::VectorXd & pred, const Eigen::VectorXd & ref, int slot)
{
  if (slot < 0 || slot >= kOutputs) {
    throw MetricError("axis slot out of range");
  }
  AxisMetrics m;
  m.axis = kReportAxis[slot];
  m.name = kAxisName[slot];
  m.unit = kAxisUnit[slot];
  m.nrmsd = nrmsd(pred, ref);
  m.sigma = rms_error(pred, ref);
  m.r2 = r_squared(pred, ref);
  m.min = ref.minCoeff();
  m.max = ref.maxCoeff();
  return m;
}

EvaluationReport evaluate(const Calibration & calib, const Dataset & dataset)
{
  EvaluationReport r;
  const Eigen::Index n = static_cast<Eigen::Index>(dataset.size());
  r.pred.resize(n, kOutputs);
  r.ref.resize(n, kOutputs);
  r.t.reserve(dataset.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Record & row = dataset.rows[i];
    r.pred.row(i) = resolve(calib, row).transpose();
    r.ref.row(i) = to_target_units(row.wrench).transpose();
    r.t.push_back(row.t);
  }
  for (int k = 0; k < kOutputs; ++k) {
    r.axes[k] = axis_report(r.pred.col(k), r.ref.col(k), k);
  }
  return r;
}

std::string format_table1(const EvaluationReport & report)
{
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-3s %-6s %-22s %-14s %-10s %-6s\n",
    "i", "axis", "Range", "sigma_i", "NRMSD(%)", "R^2");
  os << line;
  for (const AxisMetrics & m : report.axes) {
    char range[64];
    std::snprintf(range, sizeof(range), "[%.2f, %.2f] %s", m.min, m.max, m.unit.c_str());
    char sigma[32];
    std::snprintf(sigma, sizeof(sigma), "%.3f %s", m.sigma, m.unit.c_str());
    std::snprintf(line, sizeof(line), "%-3d %-6s %-22s %-14s %-10.3f %-6.3f\n",
      m.axis, m.name.c_str(), range, sigma, 100.0 * m.nrmsd, m.r2);
    os << line;
  }
  return os.str();
}

nlohmann::json to_json(const AxisMetrics & m)
{
  return {
    {"axis", m.axis}, {"name", m.name}, {"unit", m.unit}, {"min", m.min}, {"max", m.max},
    {"sigma", m.sigma}, {"nrmsd", m.nrmsd}, {"r2", m.r2}};
}

nlohmann::json to_json(const EvaluationReport & report)
{
  nlohmann::json axes = nlohmann::json::array();
  for (const AxisMetrics & m : report.axes) {
    axes.push_back(to_json(m));
  }
  return {{"rows", report.t.size()}, {"axes", axes}};
}

std::string plot_csv(const EvaluationReport & report)
{
  std::ostringstream os;
  os << 't';
  for (const char * name : kAxisName) {
    os << ',' << name << "_ref," << name << "_pred";
  }
  os << '\n';
  for (std::size_t i = 0; i < report.t.size(); ++i) {
    const Eigen::Index r = static_cast<Eigen::Index>(i);
    os << format_double(report.t[i]);
    for (int k = 0; k < kOutputs; ++k) {
      os << ',' << format_double(report.ref(r, k)) << ',' << format_double(report.pred(r, k));
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace wrench_twin
