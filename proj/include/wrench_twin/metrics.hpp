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

#ifndef WRENCH_TWIN__METRICS_HPP_
#define WRENCH_TWIN__METRICS_HPP_

#include <array>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "json.hpp"
#include "wrench_twin/calibration.hpp"

namespace wrench_twin
{

/// Root-mean-square error normalized by the range of the reference series.
/// Throws MetricError for fewer than 2 samples, unequal lengths or a
/// constant reference.
double nrmsd(const Eigen::VectorXd & pred, const Eigen::VectorXd & ref);

/// Plain rms of pred - ref.
double rms_error(const Eigen::VectorXd & pred, const Eigen::VectorXd & ref);

/// 1 - SSE / SST with SST about the mean of ref.
double r_squared(const Eigen::VectorXd & pred, const Eigen::VectorXd & ref);

struct AxisMetrics
{
  int axis = 1;          ///< 1, 2, 4, 5 or 6
  std::string name;      ///< fx, fy, mx, my, mz
  std::string unit;      ///< N or N*mm
  double min = 0.0;
  double max = 0.0;
  double sigma = 0.0;
  double nrmsd = 0.0;    ///< fraction
  double r2 = 0.0;
};

/// `slot` indexes the calibrated axes 0..4 (f_x, f_y, m_x, m_y, m_z).
AxisMetrics axis_report(const Eigen::VectorXd & pred, const Eigen::VectorXd & ref, int slot);

struct EvaluationReport
{
  std::array<AxisMetrics, kOutputs> axes;
  std::vector<double> t;
  TargetMatrix pred;
  TargetMatrix ref;
};

EvaluationReport evaluate(const Calibration & calib, const Dataset & dataset);

/// Reference values of the published bench calibration (physical rig, not
/// reproducible here): sigma, NRMSD (%) and R^2 for f_x, f_y, m_x, m_y, m_z.
struct PublishedAxis
{
  double sigma;
  double nrmsd_percent;
  double r2;
};
inline constexpr std::array<PublishedAxis, kOutputs> kPublishedTable = {{
  {0.38, 0.80, 0.98}, {0.30, 1.02, 0.98}, {9.43, 0.92, 0.97}, {12.51, 0.95, 0.97},
  {2.15, 0.21, 0.99}}};

/// Metrics table with one row per axis: i, range, sigma, NRMSD, R^2.
std::string format_table1(const EvaluationReport & report);

nlohmann::json to_json(const AxisMetrics & m);
nlohmann::json to_json(const EvaluationReport & report);

/// Time-series CSV: t then ref/pred per axis.
std::string plot_csv(const EvaluationReport & report);

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__METRICS_HPP_
