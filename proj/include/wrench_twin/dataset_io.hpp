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

#ifndef WRENCH_TWIN__DATASET_IO_HPP_
#define WRENCH_TWIN__DATASET_IO_HPP_

#include <istream>
#include <ostream>
#include <string>

#include "wrench_twin/dataset.hpp"

namespace wrench_twin
{

/// Column order of the dataset CSV. Moments and m_g are written in N*mm.
inline constexpr const char * kCsvHeader =
  "t,q3,q4,q5,q6,q7,mg,n1,n2,n3,n4,n5,n6,fx,fy,fz,mx,my,mz,cycle";

void write_csv(std::ostream & os, const Dataset & dataset);
void write_csv(const std::string & path, const Dataset & dataset);

/// Parses a dataset CSV. Columns may appear in any order; missing columns
/// raise SchemaError naming them. The sample rate is taken from the first
/// two timestamps of the file.
Dataset read_csv(std::istream & is);
Dataset read_csv(const std::string & path);

/// Shortest text that parses back to the same double.
std::string format_double(double v);

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__DATASET_IO_HPP_
