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

#ifndef WRENCH_TWIN__ERRORS_HPP_
#define WRENCH_TWIN__ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace wrench_twin
{

/// Base of every error raised by the library.
///
/// `is_numerical()` separates input/validation problems (CLI exit code 2)
/// from numerical failures (CLI exit code 3).
class Error : public std::runtime_error
{
public:
  explicit Error(const std::string & what, bool numerical = false)
  : std::runtime_error(what), numerical_(numerical) {}

  bool is_numerical() const {return numerical_;}

private:
  bool numerical_;
};

/// Invalid configuration value. `path()` is the JSON path of the offending field.
class ConfigError : public Error
{
public:
  ConfigError(std::string path, const std::string & what)
  : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}

  const std::string & path() const {return path_;}

private:
  std::string path_;
};

/// Dataset/model file does not have the expected columns or fields.
class SchemaError : public Error
{
public:
  using Error::Error;
};

/// Slit displacement beyond the linear range of the bicell.
class SaturationError : public Error
{
public:
  SaturationError(const std::string & what, double clamped)
  : Error(what, true), clamped_(clamped) {}

  /// Value clamped to the admissible range.
  double clamped() const {return clamped_;}

private:
  double clamped_;
};

/// I1 + I2 <= 0: the normalized signal is undefined.
class DegenerateSignalError : public Error
{
public:
  explicit DegenerateSignalError(const std::string & what)
  : Error(what, true) {}
};

/// Insertion places the cannula tip outside (l_c, l).
class BoundaryError : public Error
{
public:
  using Error::Error;
};

/// The beam model is not valid for the requested load (no/double contact).
class ValidityError : public Error
{
public:
  using Error::Error;
};

class PartitionError : public Error
{
public:
  using Error::Error;
};

class IdentificationError : public Error
{
public:
  explicit IdentificationError(const std::string & what)
  : Error(what, true) {}
};

class ConditioningError : public Error
{
public:
  ConditioningError(const std::string & what, double condition_number)
  : Error(what, true), condition_number_(condition_number) {}

  double condition_number() const {return condition_number_;}

private:
  double condition_number_;
};

class TrainingError : public Error
{
public:
  TrainingError(const std::string & what, int last_finite_epoch)
  : Error(what, true), last_finite_epoch_(last_finite_epoch) {}

  int last_finite_epoch() const {return last_finite_epoch_;}

private:
  int last_finite_epoch_;
};

/// Metric undefined for the given series (e.g. constant reference).
class MetricError : public Error
{
public:
  using Error::Error;
};

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__ERRORS_HPP_
