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

#ifndef WRENCH_TWIN__CALIB_NN_HPP_
#define WRENCH_TWIN__CALIB_NN_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "wrench_twin/dataset.hpp"

namespace wrench_twin
{

inline constexpr int kFeatures = 15;
inline constexpr int kHidden = 5;
inline constexpr int kOutputs = 5;
inline constexpr int kMgFeature = 2;
inline constexpr int kNNParameters = kHidden * kFeatures + kHidden + kOutputs * kHidden + kOutputs;

using FeatureVector = Eigen::Matrix<double, kFeatures, 1>;
/// (f_x, f_y, m_x, m_y, m_z) in N and N*mm.
using TargetVector = Vector5d;
using FeatureMatrix = Eigen::Matrix<double, Eigen::Dynamic, kFeatures>;
using TargetMatrix = Eigen::Matrix<double, Eigen::Dynamic, kOutputs>;

/// [q3 (mm), q4 (rad), m_g (N*mm), n1..n6, n1^2..n6^2]
FeatureVector featurize(const Record & row);
FeatureMatrix featurize(const Dataset & dataset);
TargetMatrix targets(const Dataset & dataset);

/// Per-feature standardization.
struct Scaler
{
  FeatureVector mean = FeatureVector::Zero();
  FeatureVector std = FeatureVector::Ones();

  /// Fits on the rows of X. Features with no spread keep std = 1.
  static Scaler fit(const FeatureMatrix & X);

  FeatureVector transform(const FeatureVector & x) const;
  FeatureVector inverse(const FeatureVector & z) const;
  FeatureMatrix transform(const FeatureMatrix & X) const;
};

enum class Activation { kTanh, kLinear };

const char * to_string(Activation a);
Activation activation_from_string(const std::string & s);

enum class Optimizer { kLevenbergMarquardt, kMomentum };

const char * to_string(Optimizer o);
Optimizer optimizer_from_string(const std::string & s);

struct TrainingMeta
{
  std::string optimizer = "lm";
  std::uint64_t seed = 0;
  int epochs = 0;
  int best_epoch = 0;
  int restarts = 1;
  double best_val_mse = 0.0;   ///< on standardized targets
  std::size_t train_rows = 0;
  std::size_t val_rows = 0;
  TargetVector val_sigma = TargetVector::Zero();  ///< rms validation error per axis
};

/// y = W2 act(W1 scale(x) + b1) + b2
struct NNModel
{
  Scaler scaler;
  Eigen::Matrix<double, kHidden, kFeatures> W1 = Eigen::Matrix<double, kHidden, kFeatures>::Zero();
  Eigen::Matrix<double, kHidden, 1> b1 = Eigen::Matrix<double, kHidden, 1>::Zero();
  Eigen::Matrix<double, kOutputs, kHidden> W2 = Eigen::Matrix<double, kOutputs, kHidden>::Zero();
  TargetVector b2 = TargetVector::Zero();
  Activation activation = Activation::kTanh;
  std::array<bool, kFeatures> excluded{};
  TrainingMeta meta;

  Eigen::Matrix<double, kNNParameters, 1> parameters() const;
  void set_parameters(const Eigen::Matrix<double, kNNParameters, 1> & p);
};

TargetVector infer(const NNModel & model, const FeatureVector & x);
TargetMatrix infer_batch(const NNModel & model, const FeatureMatrix & X);

/// Gradient of the mean squared output error over all rows and outputs with
/// respect to the parameter vector of NNModel::parameters().
Eigen::Matrix<double, kNNParameters, 1> loss_gradient(
  const NNModel & model, const FeatureMatrix & X, const TargetMatrix & Y);

double loss(const NNModel & model, const FeatureMatrix & X, const TargetMatrix & Y);

struct TrainOptions
{
  Optimizer optimizer = Optimizer::kLevenbergMarquardt;
  double lr = 1e-2;
  double momentum = 0.9;
  double mu = 1e-3;           ///< initial LM damping
  double mu_max = 1e10;
  int max_epochs = 1000;
  int patience = 50;
  std::uint64_t seed = 1;
  Activation activation = Activation::kTanh;
  bool exclude_mg = false;
  int restarts = 1;
};

struct EpochRecord
{
  int epoch = 0;
  double train_mse = 0.0;  ///< standardized targets
  double val_mse = 0.0;    ///< standardized targets
};

struct TrainResult
{
  NNModel model;
  std::vector<EpochRecord> history;  ///< of the selected restart
};

/// Full-batch training with validation early stopping. Throws TrainingError
/// on a non-finite loss.
TrainResult train(
  const FeatureMatrix & X_train, const TargetMatrix & Y_train,
  const FeatureMatrix & X_val, const TargetMatrix & Y_val, const TrainOptions & opts = {});

TrainResult train(const Dataset & train_set, const Dataset & val_set, const TrainOptions & opts = {});

/// Max relative error between loss_gradient() and central differences with step eps.
double finite_diff_check(
  const NNModel & model, const FeatureMatrix & X, const TargetMatrix & Y, double eps);

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__CALIB_NN_HPP_
