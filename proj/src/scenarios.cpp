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

#include "wrench_twin/scenarios.hpp"

#include <cmath>
#include <sstream>

#include "wrench_twin/dataset_io.hpp"

namespace wrench_twin
{

namespace
{

const char * const kAxisName[kOutputs] = {"fx", "fy", "mx", "my", "mz"};

}  // namespace

OvercoatReport overcoat_scenario(
  const ScenarioRig & rig, const Calibration & calib, const OvercoatOptions & opts)
{
  ProfileParams pp = rig.profile;
  pp.cycles = 1;
  pp.cycle_duration = opts.duration;
  const MotionProfile profile =
    gen_profile(ProfileKind::kDataDriven, opts.seed, pp, rig.kinematics, rig.model.shaft.l);
  // The gripper stays open so that only the outer-tube path can load the signals.
  MotionProfile open = profile;
  for (ProfileSample & s : open.samples) {
    s.q7 = pp.q7_fixed;
    s.m_g = rig.kinematics.jaw.effort(s.q7);
  }

  WrenchBounds body;
  body.force_xy = opts.body_force;
  body.force_z = opts.body_force;
  body.moment_xy = opts.body_moment;
  body.moment_z = opts.body_moment;
  body.tau = opts.tau;
  const std::vector<Vector6d> tip(open.samples.size(), Vector6d::Zero());

  DisturbanceConfig dist = DisturbanceConfig::none();
  dist.signal_noise_rms = opts.noise ? rig.disturbances.signal_noise_rms : 0.0;
  dist.body_wrench_coupling = opts.coupling;

  SimulateOptions so;
  so.validity = ValidityPolicy::kKeepAll;
  so.clamp_saturation = true;
  so.body_wrench = gen_wrench_trajectory(ProfileKind::kDataDriven, opts.seed + 1, open, body);
  const SimulationResult sim = simulate(open, tip, rig.model, rig.kinematics, dist, opts.seed + 2, so);

  OvercoatReport r;
  r.coupling = opts.coupling;
  r.saturated_rows = sim.stats.saturated;
  const Eigen::Index n = static_cast<Eigen::Index>(sim.dataset.size());
  r.excess.resize(n, kOutputs);
  TargetVector floor_sq = TargetVector::Zero();
  for (Eigen::Index i = 0; i < n; ++i) {
    const Record & row = sim.dataset.rows[i];
    Record quiet = row;
    quiet.n.setZero();
    r.excess.row(i) = (resolve(calib, row) - resolve(calib, quiet)).transpose();
    floor_sq += resolve_jacobian(calib, row).rowwise().squaredNorm();
    r.t.push_back(row.t);
  }
  const double rows = std::max<double>(1.0, static_cast<double>(n));
  r.pass = true;
  for (int k = 0; k < kOutputs; ++k) {
    OvercoatAxis & a = r.axes[k];
    a.name = kAxisName[k];
    a.peak = n ? r.excess.col(k).cwiseAbs().maxCoeff() : 0.0;
    a.rms = std::sqrt(r.excess.col(k).squaredNorm() / rows);
    a.noise_floor = dist.signal_noise_rms * std::sqrt(floor_sq(k) / rows);
    a.threshold = opts.threshold_factor * a.noise_floor;
    a.pass = a.rms <= a.threshold;
    r.pass = r.pass && a.pass;
  }
  return r;
}

WristReport wrist_scenario(
  const ScenarioRig & rig, const Calibration & calib, const WristOptions & opts)
{
  const double rate = rig.profile.sample_rate;
  const long per_segment = std::lround(opts.segment_duration * rate);
  MotionProfile profile;
  profile.sample_rate = rate;
  const double two_pi = 2.0 * M_PI;
  for (int seg = 0; seg < 3; ++seg) {
    for (long i = 0; i < per_segment; ++i) {
      const double tau = static_cast<double>(i) / rate;
      const double phase = two_pi * static_cast<double>(i) / static_cast<double>(per_segment);
      ProfileSample s{};
      s.t = static_cast<double>(seg * per_segment + i) / rate;
      s.q3 = rig.profile.q3_center;
      s.q7 = opts.grasp_open;
      if (seg == 0) {
        s.q5 = opts.wrist_amplitude * std::sin(phase);
      } else if (seg == 1) {
        s.q6 = opts.wrist_amplitude * std::sin(phase);
      } else {
        const double closing = 0.5 - 0.5 * std::cos(two_pi * tau / opts.grasp_period);
        s.q7 = opts.grasp_open + (opts.grasp_closed - opts.grasp_open) * closing;
      }
      s.m_g = rig.kinematics.jaw.effort(s.q7);
      s.cycle = 1;
      profile.samples.push_back(s);
    }
  }

  DisturbanceConfig dist = DisturbanceConfig::none();
  dist.signal_noise_rms = rig.disturbances.signal_noise_rms;
  dist.jaw_coupling = rig.disturbances.jaw_coupling;
  SimulateOptions so;
  so.validity = ValidityPolicy::kKeepAll;
  const std::vector<Vector6d> tip(profile.samples.size(), Vector6d::Zero());
  const SimulationResult sim = simulate(profile, tip, rig.model, rig.kinematics, dist, opts.seed, so);

  WristReport r;
  const Eigen::Index n = static_cast<Eigen::Index>(sim.dataset.size());
  r.resolved.resize(n, kOutputs);
  for (Eigen::Index i = 0; i < n; ++i) {
    r.resolved.row(i) = resolve(calib, sim.dataset.rows[i]).transpose();
    r.t.push_back(sim.dataset.rows[i].t);
  }
  const TargetVector sigma = validation_sigma(calib);
  r.pass = true;
  for (int k = 0; k < kOutputs; ++k) {
    WristAxis & a = r.axes[k];
    a.name = kAxisName[k];
    a.peak = n ? r.resolved.col(k).cwiseAbs().maxCoeff() : 0.0;
    a.threshold = opts.sigma_factor * sigma(k);
    a.pass = a.peak <= a.threshold;
    r.pass = r.pass && a.pass;
  }
  return r;
}

nlohmann::json to_json(const OvercoatReport & r)
{
  nlohmann::json axes = nlohmann::json::array();
  for (const OvercoatAxis & a : r.axes) {
    axes.push_back({{"name", a.name}, {"peak", a.peak}, {"rms", a.rms},
        {"noise_floor", a.noise_floor}, {"threshold", a.threshold},
        {"status", a.pass ? "PASS" : "FAIL"}});
  }
  return {{"scenario", "overcoat"}, {"coupling", r.coupling}, {"rows", r.t.size()},
    {"saturated_rows", r.saturated_rows}, {"axes", axes},
    {"status", r.pass ? "PASS" : "FAIL"}};
}

nlohmann::json to_json(const WristReport & r)
{
  nlohmann::json axes = nlohmann::json::array();
  for (const WristAxis & a : r.axes) {
    axes.push_back({{"name", a.name}, {"peak", a.peak}, {"threshold", a.threshold},
        {"status", a.pass ? "PASS" : "FAIL"}});
  }
  return {{"scenario", "wrist"}, {"rows", r.t.size()}, {"axes", axes},
    {"status", r.pass ? "PASS" : "FAIL"}};
}

std::string plot_csv(const std::vector<double> & t, const TargetMatrix & series)
{
  std::ostringstream os;
  os << "t,fx,fy,mx,my,mz\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    os << format_double(t[i]);
    for (int k = 0; k < kOutputs; ++k) {
      os << ',' << format_double(series(static_cast<Eigen::Index>(i), k));
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace wrench_twin
