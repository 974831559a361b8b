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

#ifndef WRENCH_TWIN__SIMULATOR_HPP_
#define WRENCH_TWIN__SIMULATOR_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Core>

#include "wrench_twin/dataset.hpp"
#include "wrench_twin/mechanics.hpp"

namespace wrench_twin
{

enum class ProfileKind { kModelBased, kDataDriven };

const char * to_string(ProfileKind kind);

/// Jaw effort produced when the gripper closes on the calibration foam:
/// m_g = stiffness * (contact_angle - q7) for q7 < contact_angle, else 0.
struct JawModel
{
  double stiffness = 0.72;         ///< N*m/rad
  double contact_angle = 0.17453292519943295;  ///< rad (10 deg)

  double effort(double q7) const
  {
    return q7 < contact_angle ? stiffness * (contact_angle - q7) : 0.0;
  }
};

/// Fixed rig geometry for a run.
struct Kinematics
{
  double l_os = 0.30;
  double l_c = 0.035;
  JawModel jaw;
};

/// Motion profile parameters; some fields apply to one kind only.
struct ProfileParams
{
  double sample_rate = 1500.0;  ///< Hz
  int cycles = 10;
  double cycle_duration = 10.0;  ///< s
  double motion_tau = 0.6;       ///< s, correlation time of random motions

  // model-based: sequential random insertion moves over [q3_min, q3_max]
  double q3_min = 0.06;
  double q3_max = 0.22;
  double move_time = 1.0;   ///< s, mean duration of one insertion move

  // data-driven: random motion inside a cube travelling along insertion
  double q3_center = 0.16;
  double cube = 0.04;
  double travel = 0.01;

  double q4_amplitude = 0.5;  ///< rad
  double q7_min = 0.0;        ///< rad
  double q7_max = 0.15707963267948966;   ///< rad (9 deg)
  double grasp_angle = -0.17453292519943295;  ///< rad (-10 deg)
  double grasp_probability = 0.1;
  double q7_hold = 1.0;       ///< s, mean hold time of a gripper command
  double q7_fixed = 0.5235987755982988;  ///< rad, model-based gripper angle (open)
};

ProfileParams default_profile_params(ProfileKind kind);

struct ProfileSample
{
  double t;
  double q3, q4, q5, q6, q7;
  double m_g;
  int cycle;
};

struct MotionProfile
{
  double sample_rate = 1500.0;
  std::vector<ProfileSample> samples;

  double duration() const {return samples.size() / sample_rate;}
};

/// Throws ConfigError for infeasible parameters (e.g. insertion leaving (l_c, l)).
MotionProfile gen_profile(
  ProfileKind kind, std::uint64_t seed, const ProfileParams & params,
  const Kinematics & kin, double shaft_length);

/// Bounds of the synthetic tip-wrench trajectories (SI).
struct WrenchBounds
{
  double force_xy = 9.0;
  double force_z = 5.0;
  double moment_xy = 0.16;
  double moment_z = 0.1;
  double tau = 0.3;  ///< s, correlation time
  /// Model-based only: lateral force magnitude range that keeps the shaft
  /// in contact with the inner tube without closing the gap.
  double lateral_force_min = 1.0;
  double lateral_force_max = 5.0;
};

WrenchBounds default_wrench_bounds(ProfileKind kind);

/// Band-limited bounded random tip wrenches, one per profile sample.
std::vector<Vector6d> gen_wrench_trajectory(
  ProfileKind kind, std::uint64_t seed, const MotionProfile & profile,
  const WrenchBounds & bounds);

struct DisturbanceConfig
{
  double signal_noise_rms = 5.6e-7;    ///< normalized units
  double friction_coulomb = 0.0;       ///< N
  double friction_viscous = 0.0;       ///< N*s/m
  Eigen::Vector2d jaw_coupling = Eigen::Vector2d::Zero();  ///< (f_x N, m_y N*m) per N*m of m_g
  double body_wrench_coupling = 0.0;
  double reference_noise_force = 0.0;  ///< N
  double reference_noise_moment = 0.0; ///< N*m

  void validate() const;
  static DisturbanceConfig none();
};

enum class ValidityPolicy { kKeepAll, kDropInvalid, kAbort };

struct SimulateOptions
{
  ValidityPolicy validity = ValidityPolicy::kKeepAll;
  bool clamp_saturation = true;
  /// Outer-tube wrench per sample; leaks into the signals scaled by
  /// `DisturbanceConfig::body_wrench_coupling`.
  std::optional<std::vector<Vector6d>> body_wrench;
};

struct SimulationStats
{
  std::size_t valid = 0;
  std::size_t no_contact = 0;
  std::size_t double_contact = 0;
  std::size_t dropped = 0;
  std::size_t saturated = 0;
};

struct SimulationResult
{
  Dataset dataset;
  SimulationStats stats;
};

/// Synthesizes signals for a motion profile and tip-wrench trajectory.
///
/// Per sample: n = C(q3) w_eff + (2/c) H_G H_w f_friction + noise, where
/// w_eff adds the jaw and body-wrench leakage to the true tip wrench and the
/// friction acts axially at the clamp opposing insertion velocity. The
/// reference columns hold the true tip wrench.
SimulationResult simulate(
  const MotionProfile & profile, const std::vector<Vector6d> & wrench_traj,
  const SensorModel & model, const Kinematics & kin,
  const DisturbanceConfig & disturbances, std::uint64_t seed,
  const SimulateOptions & opts = {});

/// Partition scheme: leading cycles for train/val/test, or row fractions.
struct SplitScheme
{
  enum class Kind { kCycles, kFractions } kind = Kind::kCycles;
  int train_cycles = 6;
  int val_cycles = 2;
  int test_cycles = 2;
  double train_fraction = 1.0;
  double val_fraction = 0.0;
  double test_fraction = 0.0;

  static SplitScheme cycles(int train, int val, int test);
  static SplitScheme cycles_6_2_2() {return cycles(6, 2, 2);}
  static SplitScheme fractions(double train, double val, double test);
};

struct Partition
{
  Dataset train;
  Dataset val;
  Dataset test;
};

/// Disjoint, order-preserving partition. Cycle schemes put any cycles past
/// train + val into test.
Partition split(const Dataset & dataset, const SplitScheme & scheme);

/// Uniform decimation per cycle, keeping the first sample of every cycle.
Dataset subsample(const Dataset & dataset, double target_rate);

/// Unit-variance band-limited Gaussian noise: two cascaded first-order lags.
class BandLimitedNoise
{
public:
  BandLimitedNoise(double tau, double dt);

  double next(std::mt19937_64 & rng);

private:
  double a_;
  double drive_;
  double scale_;
  double x_ = 0.0;
  double y_ = 0.0;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__SIMULATOR_HPP_
