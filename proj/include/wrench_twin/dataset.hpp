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

#ifndef WRENCH_TWIN__DATASET_HPP_
#define WRENCH_TWIN__DATASET_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "wrench_twin/mechanics.hpp"
#include "wrench_twin/types.hpp"

namespace wrench_twin
{

/// One time-stamped sample. SI units internally (m, rad, N, N*m).
struct Record
{
  double t = 0.0;
  double q3 = 0.0;
  double q4 = 0.0;
  double q5 = 0.0;
  double q6 = 0.0;
  double q7 = 0.0;
  double m_g = 0.0;
  SignalVector n = SignalVector::Zero();
  Vector6d wrench = Vector6d::Zero();  ///< reference tip wrench
  int cycle = 1;

  KinematicState state(double l_os, double l_c) const
  {
    return KinematicState{q3, q4, q5, q6, q7, m_g, l_os, l_c};
  }
};

struct DatasetMeta
{
  std::string kind;
  std::uint64_t seed = 0;
  std::string config_hash;
};

/// Ordered rows with monotone timestamps and contiguous cycle indices from 1.
struct Dataset
{
  std::vector<Record> rows;
  double sample_rate = 1500.0;
  DatasetMeta meta;

  std::size_t size() const {return rows.size();}
  bool empty() const {return rows.empty();}
  int cycle_count() const;
};

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__DATASET_HPP_
