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

#ifndef WRENCH_TWIN__CALIBRATION_HPP_
#define WRENCH_TWIN__CALIBRATION_HPP_

#include <optional>
#include <string>
#include <variant>

#include "json.hpp"

#include "wrench_twin/calib_model.hpp"
#include "wrench_twin/calib_nn.hpp"

namespace wrench_twin
{

inline constexpr const char * kSchema = "wrench-twin/v1";
inline constexpr const char * kToolVersion = WRENCH_TWIN_VERSION;

struct ModelCalibration
{
  ModelCalibParams params;
  double condition_cap = 1e8;
  TargetVector validation_sigma = TargetVector::Zero();  ///< N, N*mm
  std::optional<FitReport> fit;
};

using Calibration = std::variant<ModelCalibration, NNModel>;

struct CalibrationFile
{
  Calibration calibration;
  std::string config_hash;
  std::string tool_version = kToolVersion;
};

nlohmann::json to_json(const FitReport & report);
nlohmann::json to_json(const CalibrationFile & file);

/// Throws SchemaError on a missing field or a schema version other than v1.
CalibrationFile calibration_from_json(const nlohmann::json & j);

void save_calibration(const std::string & path, const CalibrationFile & file);
CalibrationFile load_calibration(const std::string & path);

/// Resolved wrench on the calibrated axes (N, N*mm).
TargetVector resolve(const Calibration & calib, const Record & row);

/// d resolve / d n at a row.
Eigen::Matrix<double, kOutputs, 6> resolve_jacobian(const Calibration & calib, const Record & row);

/// Per-axis rms error on held-out data recorded at calibration time.
TargetVector validation_sigma(const Calibration & calib);

const char * kind_name(const Calibration & calib);

/// Pretty JSON with a trailing newline.
void write_json(const std::string & path, const nlohmann::json & j);
nlohmann::json read_json(const std::string & path);

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__CALIBRATION_HPP_
