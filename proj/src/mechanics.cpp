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

#include "wrench_twin/mechanics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wrench_twin/errors.hpp"

namespace wrench_twin
{

namespace
{

void require_positive(double v, const char * path)
{
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw ConfigError(path, "must be finite and > 0");
  }
}

}  // namespace

void ShaftProperties::validate() const
{
  require_positive(E, "shaft.E_Pa");
  require_positive(G, "shaft.G_Pa");
  require_positive(A, "shaft.A_m2");
  require_positive(I_xx, "shaft.I_xx_m4");
  require_positive(I_yy, "shaft.I_yy_m4");
  require_positive(J_zz, "shaft.J_zz_m4");
  require_positive(H, "shaft.H_m");
  require_positive(l, "shaft.l_m");
  if (!(H < l)) {
    throw ConfigError("shaft.H_m", "must be smaller than shaft.l_m");
  }
}

void CannulaConfig::validate() const
{
  require_positive(l_t, "cannula.l_t_m");
  require_positive(r, "cannula.r_m");
  require_positive(gap, "cannula.gap_m");
  require_positive(E_s, "cannula.E_s_Pa");
  require_positive(t_s, "cannula.t_s_m");
  require_positive(d_i, "cannula.d_i_m");
  require_positive(l_e, "cannula.l_e_m");
  if (!(d_o > d_i)) {
    throw ConfigError("cannula.d_o_m", "arm width must exceed the center-slot width");
  }
}

LeafSpringStiffness leaf_spring_stiffness(const CannulaConfig & c)
{
  const double I_s = (c.d_o - c.d_i) * c.t_s * c.t_s * c.t_s / 12.0;
  const double k_l = 3.0 * c.E_s * I_s / (c.l_e * c.l_e * c.l_e);
  return {k_l, 2.0 * c.r / c.l_t * k_l};
}

Matrix6d SensorModel::clamp_map() const
{
  return (2.0 / optics.half_margin()) * build_HG(hexagon) * build_Hw(shaft);
}

void SensorModel::validate() const
{
  shaft.validate();
  cannula.validate();
  if (!(contact_clearance >= 0.0)) {
    throw ConfigError("model.contact_clearance_m", "must be >= 0");
  }
  if (validity_points < 2) {
    throw ConfigError("model.validity_points", "must be >= 2");
  }
}

Matrix6d build_Hc(const KinematicState & state, const ShaftProperties & shaft, double k_s)
{
  const double l_s = state.l_s();
  if (!(l_s > state.l_c && l_s < shaft.l)) {
    throw BoundaryError(
            "l_s = " + std::to_string(l_s) + " m outside (l_c, l) = (" +
            std::to_string(state.l_c) + ", " + std::to_string(shaft.l) + ")");
  }
  if (k_s < 0.0) {
    throw ConfigError("k_s", "must be >= 0");
  }
  double g_x = 0.0;
  double g_y = 0.0;
  if (k_s > 0.0) {
    g_x = support_gain(6.0 * shaft.E * shaft.I_xx / k_s, l_s);
    g_y = support_gain(6.0 * shaft.E * shaft.I_yy / k_s, l_s);
  }
  return hc_from_gains(l_s, shaft.l, state.l_c, g_x, g_y);
}

Matrix6d sensing_matrix(const SensorModel & model, const KinematicState & state)
{
  return model.clamp_map() * build_Hc(state, model.shaft, model.k_s());
}

const char * to_string(ContactState s)
{
  switch (s) {
    case ContactState::kValid: return "valid";
    case ContactState::kNoContact: return "no-contact";
    case ContactState::kDoubleContact: return "double-contact";
  }
  return "unknown";
}

DeflectionProfile deflection_profile(
  const Wrench & w_t, const SensorModel & model, const KinematicState & state)
{
  const ShaftProperties & sh = model.shaft;
  const double a = state.l_s();
  const double l = sh.l;
  if (!(a > 0.0 && a < l)) {
    throw BoundaryError("l_s = " + std::to_string(a) + " m outside (0, l)");
  }
  // Bending in x is governed by EI_yy, bending in y by EI_xx. A positive m_y
  // bends toward +x, a positive m_x toward -y.
  const Eigen::Vector2d EI(sh.E * sh.I_yy, sh.E * sh.I_xx);
  const Eigen::Vector2d P(w_t.force.x(), w_t.force.y());
  const Eigen::Vector2d M(w_t.moment.y(), -w_t.moment.x());

  const double k_s = model.k_s();
  Eigen::Vector2d g = Eigen::Vector2d::Zero();
  if (k_s > 0.0) {
    for (int i = 0; i < 2; ++i) {
      g(i) = support_gain(6.0 * EI(i) / k_s, a);
    }
  }

  DeflectionProfile out;
  out.support_reaction = ((3.0 * l - a) * P + 3.0 * M).cwiseProduct(g);
  out.free_at_support =
    (P * (a * a * (3.0 * l - a) / 6.0) + M * (a * a / 2.0)).cwiseQuotient(EI);

  const int n = model.validity_points;
  const double x0 = std::max(0.0, a - model.cannula.l_t);
  out.x.reserve(n);
  out.v.reserve(n);
  for (int i = 0; i < n; ++i) {
    const double x = x0 + (a - x0) * i / (n - 1);
    const Eigen::Vector2d v =
      (P * (x * x * (3.0 * l - x) / 6.0) + M * (x * x / 2.0) -
      out.support_reaction * (x * x * (3.0 * a - x) / 6.0)).cwiseQuotient(EI);
    out.x.push_back(x);
    out.v.push_back(v);
  }
  return out;
}

ContactState check_validity(
  const Wrench & w_t, const SensorModel & model, const KinematicState & state)
{
  const DeflectionProfile p = deflection_profile(w_t, model, state);
  if (!(p.free_at_support.norm() > model.contact_clearance)) {
    return ContactState::kNoContact;
  }
  if (model.k_s() > 0.0 && p.support_reaction.dot(p.free_at_support) <= 0.0) {
    return ContactState::kNoContact;
  }
  const double gap = model.cannula.gap;
  for (std::size_t i = 0; i + 1 < p.v.size(); ++i) {
    if (p.v[i].norm() > gap) {
      return ContactState::kDoubleContact;
    }
  }
  return ContactState::kValid;
}

SignalVector forward(
  const Wrench & w_t, const SensorModel & model, const KinematicState & state,
  const ForwardOptions & opts)
{
  if (opts.check_validity) {
    const ContactState cs = check_validity(w_t, model, state);
    if (cs != ContactState::kValid) {
      throw ValidityError(std::string("beam model not valid: ") + to_string(cs));
    }
  }
  SignalVector n = sensing_matrix(model, state) * w_t.vector();
  for (int i = 0; i < 6; ++i) {
    if (std::abs(n(i)) > 1.0) {
      const double clamped = std::clamp(n(i), -1.0, 1.0);
      if (!opts.clamp_saturation) {
        throw SaturationError(
                "channel " + std::to_string(i + 1) + " saturated (n = " +
                std::to_string(n(i)) + ")", clamped);
      }
      n(i) = clamped;
    }
  }
  return n;
}

}  // namespace wrench_twin
