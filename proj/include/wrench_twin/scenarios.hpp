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

#ifndef WRENCH_TWIN__SCENARIOS_HPP_
#define WRENCH_TWIN__SCENARIOS_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "wrench_twin/calibration.hpp"
#include "wrench_twin/simulator.hpp"

namespace wrench_twin
{

/// Rig description shared by the scenario harnesses.
struct ScenarioRig
{
  SensorModel model;
  Kinematics kinematics;
  ProfileParams profile;          ///< data-driven motion used for the overcoat run
  DisturbanceConfig disturbances; ///< noise level and jaw coupling
};

struct OvercoatOptions
{
  double coupling = 0.0;       ///< outer-tube wrench leaking into the signals
  double duration = 10.0;      ///< s
  double body_force = 30.0;    ///< N, bound of the outer-tube force
  double body_moment = 3.0;    ///< N*m, bound of the outer-tube moment
  double tau = 0.5;            ///< s
  bool noise = true;
  double threshold_factor = 3.0;
  std::uint64_t seed = 11;
};

struct OvercoatAxis
{
  std::string name;
  double peak = 0.0;         ///< max |excess|
  double rms = 0.0;          ///< rms excess
  double noise_floor = 0.0;  ///< propagated signal noise (rms)
  double threshold = 0.0;
  bool pass = false;
};

struct OvercoatReport
{
  double coupling = 0.0;
  std::array<OvercoatAxis, kOutputs> axes;
  std::size_t saturated_rows = 0;
  bool pass = false;
  std::vector<double> t;
  TargetMatrix excess;  ///< resolved minus the zero-signal baseline
};

/// Tip wrench held at zero while a large outer-tube wrench acts; reports the
/// resolved wrench against the noise floor propagated through the calibration.
OvercoatReport overcoat_scenario(
  const ScenarioRig & rig, const Calibration & calib, const OvercoatOptions & opts = {});

struct WristOptions
{
  double segment_duration = 6.0;           ///< s per maneuver
  double wrist_amplitude = 1.0;            ///< rad, q5/q6 sweep
  double grasp_open = 0.5235987755982988;  ///< rad
  double grasp_closed = -0.17453292519943295;  ///< rad
  double grasp_period = 2.0;               ///< s
  double sigma_factor = 2.0;
  std::uint64_t seed = 13;
};

struct WristAxis
{
  std::string name;
  double peak = 0.0;       ///< max |resolved|
  double threshold = 0.0;  ///< sigma_factor * validation sigma
  bool pass = false;
};

struct WristReport
{
  std::array<WristAxis, kOutputs> axes;
  bool pass = false;
  std::vector<double> t;
  TargetMatrix resolved;
};

/// Wrist sweeps and grasp cycles with zero tip wrench and jaw coupling on.
WristReport wrist_scenario(
  const ScenarioRig & rig, const Calibration & calib, const WristOptions & opts = {});

nlohmann::json to_json(const OvercoatReport & r);
nlohmann::json to_json(const WristReport & r);

/// t then one column per calibrated axis.
std::string plot_csv(const std::vector<double> & t, const TargetMatrix & series);

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__SCENARIOS_HPP_
