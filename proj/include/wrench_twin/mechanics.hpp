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

#ifndef WRENCH_TWIN__MECHANICS_HPP_
#define WRENCH_TWIN__MECHANICS_HPP_

#include <vector>

#include <Eigen/Core>

#include "wrench_twin/optics.hpp"
#include "wrench_twin/types.hpp"

namespace wrench_twin
{

/// Continuum properties of the instrument shaft (SI units).
struct ShaftProperties
{
  double E;     ///< Young's modulus, Pa
  double G;     ///< shear modulus, Pa
  double A;     ///< cross-section area, m^2
  double I_xx;  ///< second moment of area about x, m^4
  double I_yy;  ///< second moment of area about y, m^4
  double J_zz;  ///< polar moment, m^4
  double H;     ///< separation of the active (b) and passive (c) clamps, m
  double l;     ///< distance from the distal end t to clamp b, m

  void validate() const;
};

/// Inner tube and three-arm leaf spring of the two-layer cannula.
struct CannulaConfig
{
  double l_t;           ///< inner-tube length, m
  double r;             ///< radius through the flexible-arm centerlines, m
  double gap = 1.5e-3;  ///< radial clearance between inner and outer tube, m
  double E_s;           ///< spring-steel modulus, Pa
  double t_s = 1.5e-3;  ///< sheet thickness, m
  double d_o;           ///< arm width, m
  double d_i;           ///< center-slot width, m
  double l_e;           ///< effective arm length, m

  void validate() const;
};

struct LeafSpringStiffness
{
  double k_l;  ///< single-arm stiffness, N/m
  double k_s;  ///< equivalent stiffness at the inner-tube tip, N/m
};

LeafSpringStiffness leaf_spring_stiffness(const CannulaConfig & c);

/// Instrument joint state. Lengths in m, angles in rad, jaw effort in N*m.
struct KinematicState
{
  double q3 = 0.0;
  double q4 = 0.0;
  double q5 = 0.0;
  double q6 = 0.0;
  double q7 = 0.0;
  double m_g = 0.0;
  double l_os = 0.0;
  double l_c = 0.035;

  /// Distance from the cannula tip s to clamp b.
  double l_s() const {return l_os - q3;}
};

/// Every physical parameter of the instrumented shaft.
struct SensorModel
{
  OpticalUnitParams optics;
  HexGeometry hexagon;
  ShaftProperties shaft;
  CannulaConfig cannula;
  double contact_clearance = 5e-5;  ///< shaft/inner-tube clearance at s, m
  int validity_points = 50;

  double k_s() const {return leaf_spring_stiffness(cannula).k_s;}

  /// Lumped clamp-wrench-to-signal map (2/c) H_G H_w.
  Matrix6d clamp_map() const;

  void validate() const;
};

template<typename Scalar>
Matrix6<Scalar> build_Hw(
  const Scalar & E, const Scalar & G, const Scalar & A, const Scalar & I_xx,
  const Scalar & I_yy, const Scalar & J_zz, const Scalar & H)
{
  Matrix6<Scalar> m = Matrix6<Scalar>::Zero();
  const Scalar H2 = H * H;
  const Scalar H3 = H2 * H;
  m(0, 0) = 5.0 * H3 / (6.0 * E * I_yy);
  m(0, 4) = H2 / (2.0 * E * I_yy);
  m(1, 1) = 5.0 * H3 / (6.0 * E * I_xx);
  m(1, 3) = -H2 / (2.0 * E * I_xx);
  m(2, 2) = H / (A * E);
  m(3, 1) = -3.0 * H2 / (2.0 * E * I_xx);
  m(3, 3) = H / (E * I_xx);
  m(4, 0) = 3.0 * H2 / (2.0 * E * I_yy);
  m(4, 4) = H / (E * I_yy);
  m(5, 5) = H / (G * J_zz);
  return m;
}

inline Matrix6d build_Hw(const ShaftProperties & s)
{
  return build_Hw<double>(s.E, s.G, s.A, s.I_xx, s.I_yy, s.J_zz, s.H);
}

/// g(c) = l_s^2 / (c + 2 l_s^3). `compliance` is 6 EI / k_s in m^3.
template<typename Scalar>
Scalar support_gain(const Scalar & compliance, const Scalar & l_s)
{
  return l_s * l_s / (compliance + 2.0 * l_s * l_s * l_s);
}

/// Tip-to-clamp wrench transfer for given support gains g_x = g(c_x), g_y = g(c_y).
template<typename Scalar>
Matrix6<Scalar> hc_from_gains(
  const Scalar & l_s, const Scalar & l, const Scalar & l_c,
  const Scalar & g_x, const Scalar & g_y)
{
  Matrix6<Scalar> m = Matrix6<Scalar>::Identity();
  const Scalar lever = 3.0 * l - l_s;
  const Scalar inner = l_s - l_c;
  m(0, 0) = 1.0 - lever * g_y;
  m(0, 4) = -3.0 * g_y;
  m(1, 1) = 1.0 - lever * g_x;
  m(1, 3) = 3.0 * g_x;
  m(3, 1) = lever * inner * g_x - (l - l_c);
  m(3, 3) = 1.0 - 3.0 * inner * g_x;
  m(4, 0) = (l - l_c) - lever * inner * g_y;
  m(4, 4) = 1.0 - 3.0 * inner * g_y;
  return m;
}

/// H_c from the compliances c_x = 6 EI_xx / k_s and c_y = 6 EI_yy / k_s.
template<typename Scalar>
Matrix6<Scalar> build_Hc(
  const Scalar & l_s, const Scalar & l, const Scalar & l_c,
  const Scalar & c_x, const Scalar & c_y)
{
  return hc_from_gains<Scalar>(
    l_s, l, l_c, support_gain<Scalar>(c_x, l_s), support_gain<Scalar>(c_y, l_s));
}

/// H_c for a kinematic state. k_s == 0 takes the free-cantilever limit g = 0.
/// Throws BoundaryError unless l_c < l_s < l.
Matrix6d build_Hc(const KinematicState & state, const ShaftProperties & shaft, double k_s);

/// Full tip-wrench-to-signal map C = (2/c) H_G H_w H_c.
Matrix6d sensing_matrix(const SensorModel & model, const KinematicState & state);

enum class ContactState { kValid, kNoContact, kDoubleContact };

const char * to_string(ContactState s);

/// Lateral deflection of the shaft over the inner tube, with the elastic
/// support at the cannula tip.
struct DeflectionProfile
{
  std::vector<double> x;               ///< distance from clamp b, m
  std::vector<Eigen::Vector2d> v;      ///< (x, y) deflection, m
  Eigen::Vector2d free_at_support;     ///< deflection at s without support, m
  Eigen::Vector2d support_reaction;    ///< force of the inner tube on the shaft, N
};

DeflectionProfile deflection_profile(
  const Wrench & w_t, const SensorModel & model, const KinematicState & state);

ContactState check_validity(
  const Wrench & w_t, const SensorModel & model, const KinematicState & state);

struct ForwardOptions
{
  bool check_validity = true;
  bool clamp_saturation = false;
};

/// Normalized signals for a tip wrench: n = C w_t.
///
/// Throws ValidityError when the contact state is not Valid (unless
/// `check_validity` is off) and SaturationError when |n_i| > 1 (unless
/// `clamp_saturation` is on).
SignalVector forward(
  const Wrench & w_t, const SensorModel & model, const KinematicState & state,
  const ForwardOptions & opts = {});

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__MECHANICS_HPP_
