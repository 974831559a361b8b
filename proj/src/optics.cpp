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

#include "wrench_twin/optics.hpp"

#include <algorithm>
#include <string>

#include "wrench_twin/errors.hpp"

namespace wrench_twin
{

OpticalUnitParams::OpticalUnitParams(double kappa, double slit_width, double gap_width)
: kappa_(kappa), slit_width_(slit_width), gap_width_(gap_width),
  half_margin_(0.5 * (slit_width - gap_width))
{
  if (!(kappa > 0.0)) {
    throw ConfigError("optics.kappa_A", "must be > 0");
  }
  if (!(gap_width > 0.0)) {
    throw ConfigError("optics.gap_width_m", "must be > 0");
  }
  if (!(slit_width > gap_width)) {
    throw ConfigError("optics.slit_width_m", "slit width must exceed the bicell gap width");
  }
}

Photocurrents photocurrents(double delta, const OpticalUnitParams & p)
{
  const double c = p.half_margin();
  if (!(std::abs(delta) <= c)) {
    const double clamped = std::clamp(delta, -c, c);
    throw SaturationError(
            "slit displacement " + std::to_string(delta) + " m outside +/-" +
            std::to_string(c) + " m", clamped);
  }
  return {p.kappa() * (1.0 + delta / c), p.kappa() * (1.0 - delta / c)};
}

Photocurrents photocurrents_clamped(double delta, const OpticalUnitParams & p)
{
  const double c = p.half_margin();
  return photocurrents(std::clamp(delta, -c, c), p);
}

double normalize(double i1, double i2)
{
  const double sum = i1 + i2;
  if (!(sum > 0.0)) {
    throw DegenerateSignalError("I1 + I2 must be positive");
  }
  return (i1 - i2) / sum;
}

HexGeometry::HexGeometry(double d_z, double r_s)
: d_z_(d_z), r_s_(r_s),
  orientations_{SlitOrientation::kVertical, SlitOrientation::kHorizontal,
    SlitOrientation::kVertical, SlitOrientation::kHorizontal,
    SlitOrientation::kVertical, SlitOrientation::kHorizontal}
{
  if (!(r_s > 0.0)) {
    throw ConfigError("hexagon.r_s_m", "must be > 0");
  }
  if (!std::isfinite(d_z)) {
    throw ConfigError("hexagon.d_z_m", "must be finite");
  }
}

}  // namespace wrench_twin
