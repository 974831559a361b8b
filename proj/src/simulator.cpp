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

#include "wrench_twin/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wrench_twin/errors.hpp"

namespace wrench_twin
{

int Dataset::cycle_count() const
{
  int count = 0;
  for (const Record & r : rows) {
    count = std::max(count, r.cycle);
  }
  return count;
}

const char * to_string(ProfileKind kind)
{
  return kind == ProfileKind::kModelBased ? "model-based" : "data-driven";
}

BandLimitedNoise::BandLimitedNoise(double tau, double dt)
: a_(std::exp(-dt / tau)), drive_(std::sqrt(1.0 - a_ * a_)),
  // stationary variance of the second stage is (1 + a^2) / (1 + a)^2
  scale_((1.0 + a_) / std::sqrt(1.0 + a_ * a_))
{
}

double BandLimitedNoise::next(std::mt19937_64 & rng)
{
  x_ = a_ * x_ + drive_ * normal_(rng);
  y_ = a_ * y_ + (1.0 - a_) * x_;
  return scale_ * y_;
}

ProfileParams default_profile_params(ProfileKind kind)
{
  ProfileParams p;
  if (kind == ProfileKind::kModelBased) {
    p.cycles = 2;
    p.cycle_duration = 30.0;
  } else {
    p.cycles = 10;
    p.cycle_duration = 10.0;
  }
  return p;
}

WrenchBounds default_wrench_bounds(ProfileKind kind)
{
  WrenchBounds b;
  if (kind == ProfileKind::kModelBased) {
    b.moment_xy = 0.1;
    b.force_z = 3.0;
  }
  return b;
}

namespace
{

double smoothstep(double s)
{
  s = std::clamp(s, 0.0, 1.0);
  return s * s * (3.0 - 2.0 * s);
}

/// Sequence of smooth point-to-point moves between random targets.
class RandomMoves
{
public:
  RandomMoves(double lo, double hi, double mean_duration, double start)
  : lo_(lo), hi_(hi), mean_(mean_duration), from_(start), to_(start) {}

  double at(double t, std::mt19937_64 & rng)
  {
    while (t >= t_end_) {
      from_ = to_;
      t_start_ = t_end_;
      to_ = std::uniform_real_distribution<double>(lo_, hi_)(rng);
      t_end_ = t_start_ + mean_ * std::uniform_real_distribution<double>(0.5, 1.5)(rng);
    }
    return from_ + (to_ - from_) * smoothstep((t - t_start_) / (t_end_ - t_start_));
  }

private:
  double lo_, hi_, mean_;
  double from_, to_;
  double t_start_ = 0.0;
  double t_end_ = 0.0;
};

void check_insertion_range(double q3_lo, double q3_hi, const Kinematics & kin, double l)
{
  const double ls_max = kin.l_os - q3_lo;
  const double ls_min = kin.l_os - q3_hi;
  if (!(ls_min > kin.l_c && ls_max < l)) {
    throw ConfigError(
            "simulator.profile",
            "insertion range gives l_s in [" + std::to_string(ls_min) + ", " +
            std::to_string(ls_max) + "] m, outside (l_c, l)");
  }
}

}  // namespace

MotionProfile gen_profile(
  ProfileKind kind, std::uint64_t seed, const ProfileParams & p,
  const Kinematics & kin, double shaft_length)
{
  if (!(p.sample_rate > 0.0)) {
    throw ConfigError("simulator.sample_rate_Hz", "must be > 0");
  }
  if (p.cycles < 0 || !(p.cycle_duration >= 0.0)) {
    throw ConfigError("simulator.profile", "cycles and cycle duration must be >= 0");
  }
  if (!(p.motion_tau > 0.0) || !(p.move_time > 0.0) || !(p.q7_hold > 0.0)) {
    throw ConfigError("simulator.profile", "time constants must be > 0");
  }
  if (kind == ProfileKind::kModelBased) {
    if (!(p.q3_max > p.q3_min)) {
      throw ConfigError("simulator.model_based.q3_max_m", "must exceed q3_min_m");
    }
    check_insertion_range(p.q3_min, p.q3_max, kin, shaft_length);
  } else {
    if (!(p.cube > 0.0) || p.travel < 0.0) {
      throw ConfigError("simulator.data_driven.cube_m", "cube must be > 0 and travel >= 0");
    }
    if (!(p.q7_max >= p.q7_min) || !(p.grasp_probability >= 0.0 && p.grasp_probability <= 1.0)) {
      throw ConfigError("simulator.data_driven", "invalid gripper command range");
    }
    const double half = 0.5 * (p.cube + p.travel);
    check_insertion_range(p.q3_center - half, p.q3_center + half, kin, shaft_length);
  }

  MotionProfile out;
  out.sample_rate = p.sample_rate;
  const long per_cycle = std::lround(p.cycle_duration * p.sample_rate);
  const long total = per_cycle * p.cycles;
  if (total <= 0) {
    return out;
  }
  out.samples.reserve(static_cast<std::size_t>(total));

  std::mt19937_64 rng(seed);
  const double dt = 1.0 / p.sample_rate;

  if (kind == ProfileKind::kModelBased) {
    RandomMoves insertion(p.q3_min, p.q3_max, p.move_time, 0.5 * (p.q3_min + p.q3_max));
    RandomMoves torsion(-p.q4_amplitude, p.q4_amplitude, p.move_time, 0.0);
    for (long i = 0; i < total; ++i) {
      const double t = i * dt;
      ProfileSample s{};
      s.t = t;
      s.q3 = insertion.at(t, rng);
      s.q4 = torsion.at(t, rng);
      s.q7 = p.q7_fixed;
      s.m_g = kin.jaw.effort(s.q7);
      s.cycle = static_cast<int>(i / per_cycle) + 1;
      out.samples.push_back(s);
    }
    return out;
  }

  BandLimitedNoise q3_noise(p.motion_tau, dt);
  BandLimitedNoise q4_noise(p.motion_tau, dt);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double q7 = p.q7_max;
  double hold_end = 0.0;
  const double two_pi = 2.0 * M_PI;
  for (long i = 0; i < total; ++i) {
    const double t = i * dt;
    const double phase = static_cast<double>(i % per_cycle) / per_cycle;
    if (t >= hold_end) {
      q7 = unit(rng) < p.grasp_probability ?
        p.grasp_angle : p.q7_min + (p.q7_max - p.q7_min) * unit(rng);
      hold_end = t + p.q7_hold * (0.5 + unit(rng));
    }
    ProfileSample s{};
    s.t = t;
    s.q3 = p.q3_center + 0.5 * p.travel * std::sin(two_pi * phase) +
      0.5 * p.cube * std::tanh(q3_noise.next(rng));
    s.q4 = p.q4_amplitude * std::tanh(q4_noise.next(rng));
    s.q7 = q7;
    s.m_g = kin.jaw.effort(q7);
    s.cycle = static_cast<int>(i / per_cycle) + 1;
    out.samples.push_back(s);
  }
  return out;
}

std::vector<Vector6d> gen_wrench_trajectory(
  ProfileKind kind, std::uint64_t seed, const MotionProfile & profile,
  const WrenchBounds & b)
{
  std::vector<Vector6d> out;
  out.reserve(profile.samples.size());
  if (profile.samples.empty()) {
    return out;
  }
  const double dt = 1.0 / profile.sample_rate;
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<BandLimitedNoise> noise(6, BandLimitedNoise(b.tau, dt));
  // tanh(1.2 x) of a unit-variance process reaches ~80% of the bound at 1 sigma
  constexpr double kGain = 1.2;

  if (kind == ProfileKind::kDataDriven) {
    const double bound[6] = {b.force_xy, b.force_xy, b.force_z, b.moment_xy, b.moment_xy,
      b.moment_z};
    for (std::size_t i = 0; i < profile.samples.size(); ++i) {
      Vector6d w;
      for (int k = 0; k < 6; ++k) {
        w(k) = bound[k] * std::tanh(kGain * noise[k].next(rng));
      }
      out.push_back(w);
    }
    return out;
  }

  // Model-based: a rotating lateral force whose magnitude never drops below
  // the contact level, plus bounded moments and axial force.
  BandLimitedNoise turn(b.tau * 4.0, dt);
  double angle = 0.0;
  const double turn_rate = 2.0 * M_PI / 3.0;  // rad/s at one sigma
  for (std::size_t i = 0; i < profile.samples.size(); ++i) {
    const double mag = b.lateral_force_min + (b.lateral_force_max - b.lateral_force_min) *
      (0.5 + 0.5 * std::tanh(kGain * noise[0].next(rng)));
    angle += turn_rate * turn.next(rng) * dt;
    Vector6d w;
    w(kFx) = mag * std::cos(angle);
    w(kFy) = mag * std::sin(angle);
    w(kFz) = b.force_z * std::tanh(kGain * noise[2].next(rng));
    w(kMx) = b.moment_xy * std::tanh(kGain * noise[3].next(rng));
    w(kMy) = b.moment_xy * std::tanh(kGain * noise[4].next(rng));
    w(kMz) = b.moment_z * std::tanh(kGain * noise[5].next(rng));
    noise[1].next(rng);
    out.push_back(w);
  }
  return out;
}

void DisturbanceConfig::validate() const
{
  auto nonneg = [](double v, const char * path) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError(path, "must be finite and >= 0");
      }
    };
  nonneg(signal_noise_rms, "disturbances.signal_noise_rms");
  nonneg(friction_coulomb, "disturbances.friction_coulomb_N");
  nonneg(friction_viscous, "disturbances.friction_viscous_Ns_per_m");
  nonneg(body_wrench_coupling, "disturbances.body_wrench_coupling");
  nonneg(reference_noise_force, "disturbances.reference_noise_force_N");
  nonneg(reference_noise_moment, "disturbances.reference_noise_moment_Nmm");
  if (!jaw_coupling.allFinite()) {
    throw ConfigError("disturbances.jaw_coupling", "must be finite");
  }
}

DisturbanceConfig DisturbanceConfig::none()
{
  DisturbanceConfig d;
  d.signal_noise_rms = 0.0;
  return d;
}

SimulationResult simulate(
  const MotionProfile & profile, const std::vector<Vector6d> & wrench_traj,
  const SensorModel & model, const Kinematics & kin,
  const DisturbanceConfig & dist, std::uint64_t seed,
  const SimulateOptions & opts)
{
  const std::size_t n = profile.samples.size();
  if (wrench_traj.size() != n) {
    throw ConfigError("simulate", "wrench trajectory length differs from the motion profile");
  }
  if (opts.body_wrench && opts.body_wrench->size() != n) {
    throw ConfigError("simulate", "body wrench trajectory length differs from the motion profile");
  }
  dist.validate();

  SimulationResult out;
  out.dataset.sample_rate = profile.sample_rate;
  out.dataset.meta.seed = seed;
  out.dataset.rows.reserve(n);

  const Matrix6d clamp_map = model.clamp_map();
  const double k_s = model.k_s();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  for (std::size_t i = 0; i < n; ++i) {
    const ProfileSample & s = profile.samples[i];
    const KinematicState state{s.q3, s.q4, s.q5, s.q6, s.q7, s.m_g, kin.l_os, kin.l_c};
    const Wrench w = Wrench::from_vector(wrench_traj[i]);

    const ContactState cs = check_validity(w, model, state);
    switch (cs) {
      case ContactState::kValid: ++out.stats.valid; break;
      case ContactState::kNoContact: ++out.stats.no_contact; break;
      case ContactState::kDoubleContact: ++out.stats.double_contact; break;
    }
    if (cs != ContactState::kValid) {
      if (opts.validity == ValidityPolicy::kAbort) {
        throw ValidityError(
                "row " + std::to_string(i) + ": beam model not valid (" + to_string(cs) + ")");
      }
      if (opts.validity == ValidityPolicy::kDropInvalid) {
        ++out.stats.dropped;
        continue;
      }
    }

    Vector6d w_eff = wrench_traj[i];
    w_eff(kFx) += dist.jaw_coupling(0) * s.m_g;
    w_eff(kMy) += dist.jaw_coupling(1) * s.m_g;
    if (opts.body_wrench) {
      w_eff += dist.body_wrench_coupling * (*opts.body_wrench)[i];
    }
    Vector6d w_c = build_Hc(state, model.shaft, k_s) * w_eff;

    if (dist.friction_coulomb > 0.0 || dist.friction_viscous > 0.0) {
      const std::size_t lo = i > 0 ? i - 1 : i;
      const std::size_t hi = i + 1 < n ? i + 1 : i;
      double q3_rate = 0.0;
      if (hi > lo) {
        q3_rate = (profile.samples[hi].q3 - profile.samples[lo].q3) *
          profile.sample_rate / static_cast<double>(hi - lo);
      }
      const double sgn = (q3_rate > 0.0) - (q3_rate < 0.0);
      w_c(kFz) -= dist.friction_coulomb * sgn + dist.friction_viscous * q3_rate;
    }

    Record r;
    r.t = s.t;
    r.q3 = s.q3;
    r.q4 = s.q4;
    r.q5 = s.q5;
    r.q6 = s.q6;
    r.q7 = s.q7;
    r.m_g = s.m_g;
    r.cycle = s.cycle;
    r.n = clamp_map * w_c;
    if (dist.signal_noise_rms > 0.0) {
      for (int k = 0; k < 6; ++k) {
        r.n(k) += dist.signal_noise_rms * normal(rng);
      }
    }
    bool saturated = false;
    for (int k = 0; k < 6; ++k) {
      if (std::abs(r.n(k)) > 1.0) {
        saturated = true;
        if (!opts.clamp_saturation) {
          throw SaturationError(
                  "row " + std::to_string(i) + " channel " + std::to_string(k + 1) +
                  " saturated", std::clamp(r.n(k), -1.0, 1.0));
        }
        r.n(k) = std::clamp(r.n(k), -1.0, 1.0);
      }
    }
    out.stats.saturated += saturated;

    r.wrench = wrench_traj[i];
    if (dist.reference_noise_force > 0.0 || dist.reference_noise_moment > 0.0) {
      for (int k = 0; k < 3; ++k) {
        r.wrench(k) += dist.reference_noise_force * normal(rng);
        r.wrench(k + 3) += dist.reference_noise_moment * normal(rng);
      }
    }
    out.dataset.rows.push_back(r);
  }
  return out;
}

SplitScheme SplitScheme::cycles(int train, int val, int test)
{
  SplitScheme s;
  s.kind = Kind::kCycles;
  s.train_cycles = train;
  s.val_cycles = val;
  s.test_cycles = test;
  return s;
}

SplitScheme SplitScheme::fractions(double train, double val, double test)
{
  SplitScheme s;
  s.kind = Kind::kFractions;
  s.train_fraction = train;
  s.val_fraction = val;
  s.test_fraction = test;
  return s;
}

Partition split(const Dataset & dataset, const SplitScheme & scheme)
{
  Partition p;
  for (Dataset * d : {&p.train, &p.val, &p.test}) {
    d->sample_rate = dataset.sample_rate;
    d->meta = dataset.meta;
  }

  if (scheme.kind == SplitScheme::Kind::kCycles) {
    if (scheme.train_cycles < 0 || scheme.val_cycles < 0 || scheme.test_cycles < 0) {
      throw PartitionError("cycle counts must be >= 0");
    }
    const int needed = scheme.train_cycles + scheme.val_cycles + scheme.test_cycles;
    const int available = dataset.cycle_count();
    if (available < needed) {
      throw PartitionError(
              "split needs " + std::to_string(needed) + " cycles, dataset has " +
              std::to_string(available));
    }
    for (const Record & r : dataset.rows) {
      if (r.cycle <= scheme.train_cycles) {
        p.train.rows.push_back(r);
      } else if (r.cycle <= scheme.train_cycles + scheme.val_cycles) {
        p.val.rows.push_back(r);
      } else {
        p.test.rows.push_back(r);
      }
    }
    return p;
  }

  const double f[3] = {scheme.train_fraction, scheme.val_fraction, scheme.test_fraction};
  for (double v : f) {
    if (!(v >= 0.0)) {
      throw PartitionError("fractions must be >= 0");
    }
  }
  if (std::abs(f[0] + f[1] + f[2] - 1.0) > 1e-9) {
    throw PartitionError("fractions must sum to 1");
  }
  const std::size_t n = dataset.size();
  const std::size_t n_train = static_cast<std::size_t>(std::llround(f[0] * n));
  const std::size_t n_val = std::min(n - n_train, static_cast<std::size_t>(std::llround(f[1] * n)));
  for (std::size_t i = 0; i < n; ++i) {
    Dataset & d = i < n_train ? p.train : (i < n_train + n_val ? p.val : p.test);
    d.rows.push_back(dataset.rows[i]);
  }
  return p;
}

Dataset subsample(const Dataset & dataset, double target_rate)
{
  if (!(target_rate > 0.0)) {
    throw ConfigError("subsample", "target rate must be > 0");
  }
  if (target_rate > dataset.sample_rate * (1.0 + 1e-12)) {
    throw ConfigError("subsample", "target rate exceeds the source rate");
  }
  Dataset out;
  out.sample_rate = target_rate;
  out.meta = dataset.meta;
  int cycle = -1;
  double t0 = 0.0;
  long last_slot = -1;
  for (const Record & r : dataset.rows) {
    if (r.cycle != cycle) {
      cycle = r.cycle;
      t0 = r.t;
      last_slot = -1;
    }
    const long slot = static_cast<long>(std::floor((r.t - t0) * target_rate + 1e-6));
    if (slot > last_slot) {
      out.rows.push_back(r);
      last_slot = slot;
    }
  }
  return out;
}

}  // namespace wrench_twin
