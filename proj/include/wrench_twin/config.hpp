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

#ifndef WRENCH_TWIN__CONFIG_HPP_
#define WRENCH_TWIN__CONFIG_HPP_

#include <string>
#include <utility>

#include "json.hpp"
#include "wrench_twin/calib_model.hpp"
#include "wrench_twin/calib_nn.hpp"
#include "wrench_twin/scenarios.hpp"
#include "wrench_twin/simulator.hpp"

namespace wrench_twin
{

struct ProfileSettings
{
  ProfileParams profile;
  WrenchBounds wrench;
  ValidityPolicy validity = ValidityPolicy::kDropInvalid;
};

struct NNSettings
{
  TrainOptions train;
  double subsample_rate = 100.0;  ///< Hz
  SplitScheme split = SplitScheme::cycles_6_2_2();
};

/// Everything a command needs besides its input files and flags.
struct Config
{
  explicit Config(SensorModel m)
  : model(std::move(m)) {}

  SensorModel model;
  Kinematics kinematics;
  ProfileSettings model_based;
  ProfileSettings data_driven;
  DisturbanceConfig disturbances;
  IdentifyOptions identify;
  int model_train_cycles = 1;
  double condition_cap = 1e8;
  NNSettings nn;
  OvercoatOptions overcoat;
  WristOptions wrist;

  const ProfileSettings & settings(ProfileKind kind) const
  {
    return kind == ProfileKind::kModelBased ? model_based : data_driven;
  }

  ScenarioRig rig() const {return {model, kinematics, data_driven.profile, disturbances};}
};

Config default_config();

/// Full config as JSON with unit-suffixed keys (N*mm for moments and m_g).
nlohmann::json config_to_json(const Config & c);

/// Overlays `overrides` onto the defaults. Unknown keys and wrong types raise
/// ConfigError naming the JSON path; the result is validated.
Config config_from_json(const nlohmann::json & overrides);

Config load_config(const std::string & path);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const Config & c);

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__CONFIG_HPP_
