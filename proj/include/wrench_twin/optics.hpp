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

#ifndef WRENCH_TWIN__OPTICS_HPP_
#define WRENCH_TWIN__OPTICS_HPP_

#include <array>
#include <cmath>

#include "wrench_twin/types.hpp"

namespace wrench_twin
{

/// Constants of one LED / slit / bicell sensing unit.
///
/// The half margin c = (s - g) / 2 is computed once at construction;
/// construction fails when s <= g or kappa <= 0.
class OpticalUnitParams
{
public:
  OpticalUnitParams(double kappa, double slit_width, double gap_width);

  double kappa() const {return kappa_;}
  double slit_width() const {return slit_width_;}
  double gap_width() const {return gap_width_;}
  double half_margin() const {return half_margin_;}

private:
  double kappa_;
  double slit_width_;
  double gap_width_;
  double half_margin_;
};

struct Photocurrents
{
  double i1;
  double i2;
};

/// Bicell photocurrents for a slit displacement `delta` (m).
/// Throws SaturationError (carrying the clamped displacement) when |delta| > c.
Photocurrents photocurrents(double delta, const OpticalUnitParams & p);

/// Same as photocurrents() but clamps delta to [-c, c] instead of throwing.
Photocurrents photocurrents_clamped(double delta, const OpticalUnitParams & p);

/// Normalized differential photocurrent (I1 - I2) / (I1 + I2).
double normalize(double i1, double i2);

enum class SlitOrientation { kHorizontal, kVertical };

/// Hexagonal arrangement of the six sensing units.
///
/// Units are numbered 1..6 counterclockwise. Units 1, 3, 5 have vertical
/// slits (lateral force and torsion), units 2, 4, 6 horizontal slits (axial
/// force and lateral moments), matching the row order of build_HG().
class HexGeometry
{
public:
  HexGeometry(double d_z, double r_s);

  double d_z() const {return d_z_;}
  double r_s() const {return r_s_;}
  const std::array<SlitOrientation, 6> & unit_orientations() const {return orientations_;}

private:
  double d_z_;
  double r_s_;
  std::array<SlitOrientation, 6> orientations_;
};

/// Geometric map from the tri-axial displacement and rotation at the clamp
/// of the passive component to the six slit displacements.
template<typename Scalar>
Matrix6<Scalar> build_HG(const Scalar & d_z, const Scalar & r_s)
{
  const Scalar h = Scalar(std::sqrt(3.0) / 2.0);
  const Scalar half = Scalar(0.5);
  const Scalar zero = Scalar(0.0);
  const Scalar one = Scalar(1.0);
  Matrix6<Scalar> m;
  m << zero, one, zero, d_z, zero, r_s,
    zero, zero, one, h * r_s, -half * r_s, zero,
    -h, -half, zero, -half * d_z, h * d_z, r_s,
    zero, zero, one, zero, r_s, zero,
    h, -half, zero, -half * d_z, -h * d_z, r_s,
    zero, zero, one, -h * r_s, -half * r_s, zero;
  return m;
}

inline Matrix6d build_HG(const HexGeometry & geom)
{
  return build_HG<double>(geom.d_z(), geom.r_s());
}

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__OPTICS_HPP_
