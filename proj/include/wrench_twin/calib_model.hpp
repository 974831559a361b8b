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

#ifndef WRENCH_TWIN__CALIB_MODEL_HPP_
#define WRENCH_TWIN__CALIB_MODEL_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "wrench_twin/dataset.hpp"
#include "wrench_twin/mechanics.hpp"

namespace wrench_twin
{

/// Lumped calibration map plus boundary-condition parameters.
struct ModelCalibParams
{
  Matrix6d C_m = Matrix6d::Zero();
  double c_x = 0.0;   ///< m^3
  double c_y = 0.0;   ///< m^3
  double l = 0.0;     ///< m
  double l_os = 0.0;  ///< m
  double l_c = 0.035; ///< m, held fixed

  /// H_c at insertion q3 with these boundary parameters.
  Matrix6d Hc(double q3) const;
};

struct StartResult
{
  int index = 0;
  bool converged = false;
  double cost = 0.0;  ///< residual MSE
  int iterations = 0;
};

struct FitReport
{
  ModelCalibParams best;
  double residual_mse = 0.0;
  std::vector<StartResult> starts;
  std::uint64_t seed = 0;
  std::size_t rows_used = 0;
  std::size_t rows_excluded = 0;
};

/// Box of the identification (c_x, c_y, l, l_os).
struct IdentificationBounds
{
  Eigen::Vector4d lower;
  Eigen::Vector4d upper;
  double q3_min = 0.0;
  double q3_max = 0.0;
  double l_c = 0.035;

  /// Coupled constraint l_c < l_os - q3 < l for every row.
  bool feasible(const Eigen::Vector4d & theta) const;
};

enum class IdentifyMethod { kVariableProjection, kJoint };

struct IdentifyOptions
{
  int n_starts = 64;
  std::uint64_t seed = 1;
  IdentifyMethod method = IdentifyMethod::kVariableProjection;
  int max_iterations = 500;
  double ftol = 1e-10;
  double gtol = 1e-8;
  double l_max = 0.50;      ///< upper bound on l, m
  double l_os_nominal = 0.30;  ///< used only to classify row validity
  double l_c = 0.035;
  bool check_validity = true;
};

/// (c_xn, c_yn) = (6 E I_xx / k_s, 6 E I_yy / k_s). Throws ConfigError when k_s = 0.
std::pair<double, double> nominal_compliances(const SensorModel & model);

IdentificationBounds identification_bounds(
  const SensorModel & model, const Dataset & dataset, const IdentifyOptions & opts);

/// Stacked residual n - C_m H_c(q3) w_ref, row-major by (row, channel).
Eigen::VectorXd residual(const ModelCalibParams & params, const Dataset & dataset);

/// Closed-form least-squares C_m for fixed boundary parameters.
Matrix6d solve_Cm(const ModelCalibParams & boundary, const Dataset & dataset);

/// Multi-start bounded least squares. Rows failing the validity check are
/// excluded. Throws IdentificationError when fewer than 42 rows remain, the
/// reference wrenches are rank deficient, or no start converges.
FitReport identify(const Dataset & dataset, const SensorModel & model, const IdentifyOptions & opts = {});

/// w = (C_m H_c(q3))^-1 n. Throws ConditioningError when cond(C_m H_c) > cap.
Vector6d predict(
  const ModelCalibParams & params, const SignalVector & n, double q3,
  double condition_cap = 1e8);

/// 2-norm condition number of C_m H_c(q3).
double condition_number(const ModelCalibParams & params, double q3);

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__CALIB_MODEL_HPP_
