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

#include "wrench_twin/config.hpp"

#include <cmath>
#include <cstdio>

#include "wrench_twin/calibration.hpp"
#include "wrench_twin/errors.hpp"

namespace wrench_twin
{

using nlohmann::json;

namespace
{

constexpr double kPi = 3.14159265358979323846;

SensorModel default_model()
{
  const double od = 8.3e-3;
  const double id = 6.5e-3;
  const double I = kPi / 64.0 * (std::pow(od, 4) - std::pow(id, 4));
  ShaftProperties shaft{193e9, 74e9, kPi / 4.0 * (od * od - id * id), I, I, 2.0 * I, 0.035, 0.45};
  CannulaConfig cannula{0.20, 0.02, 1.5e-3, 200e9, 1.5e-3, 6e-3, 4e-3, 0.10};
  return SensorModel{
    OpticalUnitParams(1e-6, 1.0e-3, 0.1e-3), HexGeometry(0.01, 0.015), shaft, cannula};
}

const char * policy_name(ValidityPolicy p)
{
  switch (p) {
    case ValidityPolicy::kKeepAll: return "keep-all";
    case ValidityPolicy::kDropInvalid: return "drop-invalid";
    case ValidityPolicy::kAbort: return "abort";
  }
  return "drop-invalid";
}

ValidityPolicy policy_from(const std::string & s, const std::string & path)
{
  if (s == "keep-all") {
    return ValidityPolicy::kKeepAll;
  }
  if (s == "drop-invalid") {
    return ValidityPolicy::kDropInvalid;
  }
  if (s == "abort") {
    return ValidityPolicy::kAbort;
  }
  throw ConfigError(path, "expected keep-all, drop-invalid or abort");
}

json profile_json(const ProfileSettings & s)
{
  const ProfileParams & p = s.profile;
  const WrenchBounds & w = s.wrench;
  return {
    {"sample_rate_Hz", p.sample_rate},
    {"cycles", p.cycles},
    {"cycle_duration_s", p.cycle_duration},
    {"motion_tau_s", p.motion_tau},
    {"q3_min_m", p.q3_min},
    {"q3_max_m", p.q3_max},
    {"move_time_s", p.move_time},
    {"q3_center_m", p.q3_center},
    {"cube_m", p.cube},
    {"travel_m", p.travel},
    {"q4_amplitude_rad", p.q4_amplitude},
    {"q7_min_rad", p.q7_min},
    {"q7_max_rad", p.q7_max},
    {"grasp_angle_rad", p.grasp_angle},
    {"grasp_probability", p.grasp_probability},
    {"q7_hold_s", p.q7_hold},
    {"q7_fixed_rad", p.q7_fixed},
    {"validity_policy", policy_name(s.validity)},
    {"wrench", {
        {"force_xy_N", w.force_xy},
        {"force_z_N", w.force_z},
        {"moment_xy_Nmm", 1e3 * w.moment_xy},
        {"moment_z_Nmm", 1e3 * w.moment_z},
        {"tau_s", w.tau},
        {"lateral_force_min_N", w.lateral_force_min},
        {"lateral_force_max_N", w.lateral_force_max}}},
  };
}

ProfileSettings profile_from(const json & j, const std::string & path)
{
  ProfileSettings s;
  ProfileParams & p = s.profile;
  p.sample_rate = j.at("sample_rate_Hz");
  p.cycles = j.at("cycles");
  p.cycle_duration = j.at("cycle_duration_s");
  p.motion_tau = j.at("motion_tau_s");
  p.q3_min = j.at("q3_min_m");
  p.q3_max = j.at("q3_max_m");
  p.move_time = j.at("move_time_s");
  p.q3_center = j.at("q3_center_m");
  p.cube = j.at("cube_m");
  p.travel = j.at("travel_m");
  p.q4_amplitude = j.at("q4_amplitude_rad");
  p.q7_min = j.at("q7_min_rad");
  p.q7_max = j.at("q7_max_rad");
  p.grasp_angle = j.at("grasp_angle_rad");
  p.grasp_probability = j.at("grasp_probability");
  p.q7_hold = j.at("q7_hold_s");
  p.q7_fixed = j.at("q7_fixed_rad");
  s.validity = policy_from(j.at("validity_policy"), path + ".validity_policy");
  const json & w = j.at("wrench");
  s.wrench.force_xy = w.at("force_xy_N");
  s.wrench.force_z = w.at("force_z_N");
  s.wrench.moment_xy = 1e-3 * w.at("moment_xy_Nmm").get<double>();
  s.wrench.moment_z = 1e-3 * w.at("moment_z_Nmm").get<double>();
  s.wrench.tau = w.at("tau_s");
  s.wrench.lateral_force_min = w.at("lateral_force_min_N");
  s.wrench.lateral_force_max = w.at("lateral_force_max_N");
  return s;
}

bool same_kind(const json & a, const json & b)
{
  if (a.is_number() && b.is_number()) {
    if (a.is_number_integer() || a.is_number_unsigned()) {
      return b.is_number_integer() || b.is_number_unsigned();
    }
    return true;
  }
  return a.type() == b.type();
}

void overlay(json & base, const json & over, const std::string & path)
{
  if (!over.is_object()) {
    throw ConfigError(path.empty() ? "<root>" : path, "expected an object");
  }
  for (auto it = over.begin(); it != over.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) {
      throw ConfigError(key, "unknown key");
    }
    json & slot = base[it.key()];
    if (slot.is_object()) {
      overlay(slot, it.value(), key);
    } else if (!same_kind(slot, it.value())) {
      throw ConfigError(key, std::string("expected ") + slot.type_name());
    } else {
      slot = it.value();
    }
  }
}

void require(bool ok, const char * path, const char * what)
{
  if (!ok) {
    throw ConfigError(path, what);
  }
}

}  // namespace

Config default_config()
{
  Config c{default_model()};
  c.model_based.profile = default_profile_params(ProfileKind::kModelBased);
  c.model_based.wrench = default_wrench_bounds(ProfileKind::kModelBased);
  c.data_driven.profile = default_profile_params(ProfileKind::kDataDriven);
  c.data_driven.wrench = default_wrench_bounds(ProfileKind::kDataDriven);
  c.disturbances.signal_noise_rms = 5.6e-7;
  c.disturbances.friction_coulomb = 1.0;
  c.disturbances.friction_viscous = 5.0;
  c.disturbances.jaw_coupling = Eigen::Vector2d(20.0, 0.6);
  return c;
}

json config_to_json(const Config & c)
{
  const SensorModel & m = c.model;
  const TrainOptions & t = c.nn.train;
  return {
    {"schema", kSchema},
    {"optics", {
        {"kappa_A", m.optics.kappa()},
        {"slit_width_m", m.optics.slit_width()},
        {"gap_width_m", m.optics.gap_width()}}},
    {"hexagon", {{"d_z_m", m.hexagon.d_z()}, {"r_s_m", m.hexagon.r_s()}}},
    {"shaft", {
        {"E_Pa", m.shaft.E}, {"G_Pa", m.shaft.G}, {"A_m2", m.shaft.A},
        {"I_xx_m4", m.shaft.I_xx}, {"I_yy_m4", m.shaft.I_yy}, {"J_zz_m4", m.shaft.J_zz},
        {"H_m", m.shaft.H}, {"l_m", m.shaft.l}}},
    {"cannula", {
        {"l_t_m", m.cannula.l_t}, {"r_m", m.cannula.r}, {"gap_m", m.cannula.gap},
        {"E_s_Pa", m.cannula.E_s}, {"t_s_m", m.cannula.t_s}, {"d_o_m", m.cannula.d_o},
        {"d_i_m", m.cannula.d_i}, {"l_e_m", m.cannula.l_e}}},
    {"validity", {
        {"contact_clearance_m", m.contact_clearance}, {"points", m.validity_points}}},
    {"kinematics", {
        {"l_os_m", c.kinematics.l_os},
        {"l_c_m", c.kinematics.l_c},
        {"jaw_stiffness_Nmm_per_rad", 1e3 * c.kinematics.jaw.stiffness},
        {"jaw_contact_angle_rad", c.kinematics.jaw.contact_angle}}},
    {"simulator", {
        {"model_based", profile_json(c.model_based)},
        {"data_driven", profile_json(c.data_driven)}}},
    {"disturbances", {
        {"signal_noise_rms", c.disturbances.signal_noise_rms},
        {"friction_coulomb_N", c.disturbances.friction_coulomb},
        {"friction_viscous_Ns_per_m", c.disturbances.friction_viscous},
        {"jaw_coupling_fx_N_per_Nmm", 1e-3 * c.disturbances.jaw_coupling(0)},
        {"jaw_coupling_my_Nmm_per_Nmm", c.disturbances.jaw_coupling(1)},
        {"body_wrench_coupling", c.disturbances.body_wrench_coupling},
        {"reference_noise_force_N", c.disturbances.reference_noise_force},
        {"reference_noise_moment_Nmm", 1e3 * c.disturbances.reference_noise_moment}}},
    {"calibration", {
        {"model", {
            {"starts", c.identify.n_starts},
            {"seed", c.identify.seed},
            {"method", c.identify.method == IdentifyMethod::kJoint ? "joint" : "varpro"},
            {"max_iterations", c.identify.max_iterations},
            {"ftol", c.identify.ftol},
            {"gtol", c.identify.gtol},
            {"l_max_m", c.identify.l_max},
            {"train_cycles", c.model_train_cycles},
            {"condition_cap", c.condition_cap}}},
        {"nn", {
            {"optimizer", to_string(t.optimizer)},
            {"lr", t.lr},
            {"momentum", t.momentum},
            {"mu", t.mu},
            {"mu_max", t.mu_max},
            {"max_epochs", t.max_epochs},
            {"patience", t.patience},
            {"seed", t.seed},
            {"activation", to_string(t.activation)},
            {"exclude_mg", t.exclude_mg},
            {"restarts", t.restarts},
            {"subsample_Hz", c.nn.subsample_rate},
            {"train_cycles", c.nn.split.train_cycles},
            {"val_cycles", c.nn.split.val_cycles},
            {"test_cycles", c.nn.split.test_cycles}}}}},
    {"scenarios", {
        {"overcoat", {
            {"coupling", c.overcoat.coupling},
            {"duration_s", c.overcoat.duration},
            {"body_force_N", c.overcoat.body_force},
            {"body_moment_Nmm", 1e3 * c.overcoat.body_moment},
            {"tau_s", c.overcoat.tau},
            {"noise", c.overcoat.noise},
            {"threshold_factor", c.overcoat.threshold_factor},
            {"seed", c.overcoat.seed}}},
        {"wrist", {
            {"segment_duration_s", c.wrist.segment_duration},
            {"wrist_amplitude_rad", c.wrist.wrist_amplitude},
            {"grasp_open_rad", c.wrist.grasp_open},
            {"grasp_closed_rad", c.wrist.grasp_closed},
            {"grasp_period_s", c.wrist.grasp_period},
            {"sigma_factor", c.wrist.sigma_factor},
            {"seed", c.wrist.seed}}}}},
  };
}

Config config_from_json(const json & overrides)
{
  json j = config_to_json(default_config());
  overlay(j, overrides, "");
  if (j.at("schema") != kSchema) {
    throw ConfigError("schema", std::string("expected ") + kSchema);
  }

  const json & o = j.at("optics");
  const json & h = j.at("hexagon");
  const json & s = j.at("shaft");
  const json & cn = j.at("cannula");
  ShaftProperties shaft{s.at("E_Pa"), s.at("G_Pa"), s.at("A_m2"), s.at("I_xx_m4"),
    s.at("I_yy_m4"), s.at("J_zz_m4"), s.at("H_m"), s.at("l_m")};
  CannulaConfig cannula{cn.at("l_t_m"), cn.at("r_m"), cn.at("gap_m"), cn.at("E_s_Pa"),
    cn.at("t_s_m"), cn.at("d_o_m"), cn.at("d_i_m"), cn.at("l_e_m")};
  Config c{SensorModel{
      OpticalUnitParams(o.at("kappa_A"), o.at("slit_width_m"), o.at("gap_width_m")),
      HexGeometry(h.at("d_z_m"), h.at("r_s_m")), shaft, cannula}};
  c.model.contact_clearance = j.at("validity").at("contact_clearance_m");
  c.model.validity_points = j.at("validity").at("points");

  const json & k = j.at("kinematics");
  c.kinematics.l_os = k.at("l_os_m");
  c.kinematics.l_c = k.at("l_c_m");
  c.kinematics.jaw.stiffness = 1e-3 * k.at("jaw_stiffness_Nmm_per_rad").get<double>();
  c.kinematics.jaw.contact_angle = k.at("jaw_contact_angle_rad");

  c.model_based = profile_from(j.at("simulator").at("model_based"), "simulator.model_based");
  c.data_driven = profile_from(j.at("simulator").at("data_driven"), "simulator.data_driven");

  const json & d = j.at("disturbances");
  c.disturbances.signal_noise_rms = d.at("signal_noise_rms");
  c.disturbances.friction_coulomb = d.at("friction_coulomb_N");
  c.disturbances.friction_viscous = d.at("friction_viscous_Ns_per_m");
  c.disturbances.jaw_coupling = Eigen::Vector2d(
    1e3 * d.at("jaw_coupling_fx_N_per_Nmm").get<double>(),
    d.at("jaw_coupling_my_Nmm_per_Nmm").get<double>());
  c.disturbances.body_wrench_coupling = d.at("body_wrench_coupling");
  c.disturbances.reference_noise_force = d.at("reference_noise_force_N");
  c.disturbances.reference_noise_moment = 1e-3 * d.at("reference_noise_moment_Nmm").get<double>();

  const json & cm = j.at("calibration").at("model");
  c.identify.n_starts = cm.at("starts");
  c.identify.seed = cm.at("seed");
  const std::string method = cm.at("method");
  require(method == "varpro" || method == "joint", "calibration.model.method",
    "expected varpro or joint");
  c.identify.method = method == "joint" ? IdentifyMethod::kJoint : IdentifyMethod::kVariableProjection;
  c.identify.max_iterations = cm.at("max_iterations");
  c.identify.ftol = cm.at("ftol");
  c.identify.gtol = cm.at("gtol");
  c.identify.l_max = cm.at("l_max_m");
  c.identify.l_os_nominal = c.kinematics.l_os;
  c.identify.l_c = c.kinematics.l_c;
  c.model_train_cycles = cm.at("train_cycles");
  c.condition_cap = cm.at("condition_cap");

  const json & nn = j.at("calibration").at("nn");
  TrainOptions & t = c.nn.train;
  t.optimizer = optimizer_from_string(nn.at("optimizer"));
  t.lr = nn.at("lr");
  t.momentum = nn.at("momentum");
  t.mu = nn.at("mu");
  t.mu_max = nn.at("mu_max");
  t.max_epochs = nn.at("max_epochs");
  t.patience = nn.at("patience");
  t.seed = nn.at("seed");
  try {
    t.activation = activation_from_string(nn.at("activation"));
  } catch (const SchemaError &) {
    throw ConfigError("calibration.nn.activation", "expected tanh or linear");
  }
  t.exclude_mg = nn.at("exclude_mg");
  t.restarts = nn.at("restarts");
  c.nn.subsample_rate = nn.at("subsample_Hz");
  c.nn.split = SplitScheme::cycles(nn.at("train_cycles"), nn.at("val_cycles"), nn.at("test_cycles"));

  const json & oc = j.at("scenarios").at("overcoat");
  c.overcoat.coupling = oc.at("coupling");
  c.overcoat.duration = oc.at("duration_s");
  c.overcoat.body_force = oc.at("body_force_N");
  c.overcoat.body_moment = 1e-3 * oc.at("body_moment_Nmm").get<double>();
  c.overcoat.tau = oc.at("tau_s");
  c.overcoat.noise = oc.at("noise");
  c.overcoat.threshold_factor = oc.at("threshold_factor");
  c.overcoat.seed = oc.at("seed");
  const json & w = j.at("scenarios").at("wrist");
  c.wrist.segment_duration = w.at("segment_duration_s");
  c.wrist.wrist_amplitude = w.at("wrist_amplitude_rad");
  c.wrist.grasp_open = w.at("grasp_open_rad");
  c.wrist.grasp_closed = w.at("grasp_closed_rad");
  c.wrist.grasp_period = w.at("grasp_period_s");
  c.wrist.sigma_factor = w.at("sigma_factor");
  c.wrist.seed = w.at("seed");

  c.model.validate();
  c.disturbances.validate();
  require(c.kinematics.l_c > 0.0, "kinematics.l_c_m", "must be > 0");
  require(c.kinematics.l_os > c.kinematics.l_c, "kinematics.l_os_m", "must exceed l_c_m");
  require(c.kinematics.jaw.stiffness >= 0.0, "kinematics.jaw_stiffness_Nmm_per_rad", "must be >= 0");
  require(c.identify.n_starts >= 1, "calibration.model.starts", "must be >= 1");
  require(c.identify.max_iterations >= 1, "calibration.model.max_iterations", "must be >= 1");
  require(c.model_train_cycles >= 1, "calibration.model.train_cycles", "must be >= 1");
  require(c.condition_cap > 1.0, "calibration.model.condition_cap", "must be > 1");
  require(t.max_epochs >= 0, "calibration.nn.max_epochs", "must be >= 0");
  require(t.patience >= 1, "calibration.nn.patience", "must be >= 1");
  require(t.restarts >= 1, "calibration.nn.restarts", "must be >= 1");
  require(c.nn.subsample_rate > 0.0, "calibration.nn.subsample_Hz", "must be > 0");
  require(c.overcoat.duration > 0.0, "scenarios.overcoat.duration_s", "must be > 0");
  require(c.wrist.segment_duration > 0.0, "scenarios.wrist.segment_duration_s", "must be > 0");
  require(c.wrist.grasp_period > 0.0, "scenarios.wrist.grasp_period_s", "must be > 0");
  return c;
}

Config load_config(const std::string & path)
{
  json j;
  try {
    j = read_json(path);
  } catch (const SchemaError & e) {
    throw ConfigError(path, e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const Config & c)
{
  const std::string text = config_to_json(c).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace wrench_twin
