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


#ifndef WRENCH_TWIN_TESTS__FIXTURES_HPP_
#define WRENCH_TWIN_TESTS__FIXTURES_HPP_

#include <cstdint>

#include "wrench_twin/config.hpp"
#include "wrench_twin/simulator.hpp"

namespace fixtures
{

/// Default configuration with every disturbance switched off.
inline wrench_twin::Config quiet_config()
{
  wrench_twin::Config c = wrench_twin::default_config();
  c.disturbances = wrench_twin::DisturbanceConfig::none();
  return c;
}

struct RunShape
{
  double sample_rate = 100.0;
  int cycles = 2;
  double cycle_duration = 10.0;
};

inline wrench_twin::SimulationResult run(
  const wrench_twin::Config & c, wrench_twin::ProfileKind kind, std::uint64_t seed,
  const RunShape & shape)
{
  const wrench_twin::ProfileSettings & s = c.settings(kind);
  wrench_twin::ProfileParams pp = s.profile;
  pp.sample_rate = shape.sample_rate;
  pp.cycles = shape.cycles;
  pp.cycle_duration = shape.cycle_duration;
  const auto profile = wrench_twin::gen_profile(kind, seed, pp, c.kinematics, c.model.shaft.l);
  const auto traj = wrench_twin::gen_wrench_trajectory(kind, seed, profile, s.wrench);
  wrench_twin::SimulateOptions so;
  so.validity = s.validity;
  return wrench_twin::simulate(profile, traj, c.model, c.kinematics, c.disturbances, seed, so);
}

inline wrench_twin::Dataset dataset(
  const wrench_twin::Config & c, wrench_twin::ProfileKind kind, std::uint64_t seed,
  const RunShape & shape)
{
  return run(c, kind, seed, shape).dataset;
}

}  // namespace fixtures

#endif  // WRENCH_TWIN_TESTS__FIXTURES_HPP_
