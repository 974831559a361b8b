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

#ifndef WRENCH_TWIN__TYPES_HPP_
#define WRENCH_TWIN__TYPES_HPP_

#include <Eigen/Core>

namespace wrench_twin
{

template<typename Scalar>
using Matrix6 = Eigen::Matrix<Scalar, 6, 6>;
template<typename Scalar>
using Vector6 = Eigen::Matrix<Scalar, 6, 1>;

using Matrix6d = Matrix6<double>;
using Vector6d = Vector6<double>;
using Vector5d = Eigen::Matrix<double, 5, 1>;

/// Six normalized transducer signals n_1..n_6.
using SignalVector = Vector6d;

/// Wrench component order used everywhere: f_x, f_y, f_z, m_x, m_y, m_z.
enum Axis : int { kFx = 0, kFy = 1, kFz = 2, kMx = 3, kMy = 4, kMz = 5 };

enum class Frame { kTip, kClamp };

/// Forces in N and moments in N*m at a named frame.
///
/// Right-handed frame with z along the shaft toward the tip; the same
/// convention is used at the tip (t) and at the clamp (c).
struct Wrench
{
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
  Eigen::Vector3d moment = Eigen::Vector3d::Zero();
  Frame frame = Frame::kTip;

  Vector6d vector() const
  {
    Vector6d w;
    w << force, moment;
    return w;
  }

  static Wrench from_vector(const Vector6d & w, Frame frame = Frame::kTip)
  {
    return Wrench{w.head<3>(), w.tail<3>(), frame};
  }
};

// Calibrated axes use the accuracy-table indices 1, 2, 4, 5, 6 (f_z excluded).
inline constexpr int kCalibratedAxes[5] = {kFx, kFy, kMx, kMy, kMz};

/// Converts a 6-wrench in SI (N, N*m) to the 5 calibrated axes in N, N*mm.
inline Vector5d to_target_units(const Vector6d & w)
{
  Vector5d y;
  y << w(kFx), w(kFy), 1e3 * w(kMx), 1e3 * w(kMy), 1e3 * w(kMz);
  return y;
}

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__TYPES_HPP_
