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

#include "wrench_twin/calib_nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Cholesky>

#include "wrench_twin/errors.hpp"

namespace wrench_twin
{

namespace
{

using Params = Eigen::Matrix<double, kNNParameters, 1>;
using W1Matrix = Eigen::Matrix<double, kHidden, kFeatures>;
using W2Matrix = Eigen::Matrix<double, kOutputs, kHidden>;
using HiddenVector = Eigen::Matrix<double, kHidden, 1>;

constexpr int kOffB1 = kHidden * kFeatures;
constexpr int kOffW2 = kOffB1 + kHidden;
constexpr int kOffB2 = kOffW2 + kOutputs * kHidden;

struct Net
{
  W1Matrix W1 = W1Matrix::Zero();
  HiddenVector b1 = HiddenVector::Zero();
  W2Matrix W2 = W2Matrix::Zero();
  TargetVector b2 = TargetVector::Zero();
  Activation act = Activation::kTanh;
};

Params pack(const Net & n)
{
  Params p;
  for (int j = 0; j < kHidden; ++j) {
    for (int m = 0; m < kFeatures; ++m) {
      p(kFeatures * j + m) = n.W1(j, m);
    }
    p(kOffB1 + j) = n.b1(j);
  }
  for (int k = 0; k < kOutputs; ++k) {
    for (int j = 0; j < kHidden; ++j) {
      p(kOffW2 + kHidden * k + j) = n.W2(k, j);
    }
    p(kOffB2 + k) = n.b2(k);
  }
  return p;
}

void unpack(const Params & p, Net & n)
{
  for (int j = 0; j < kHidden; ++j) {
    for (int m = 0; m < kFeatures; ++m) {
      n.W1(j, m) = p(kFeatures * j + m);
    }
    n.b1(j) = p(kOffB1 + j);
  }
  for (int k = 0; k < kOutputs; ++k) {
    for (int j = 0; j < kHidden; ++j) {
      n.W2(k, j) = p(kOffW2 + kHidden * k + j);
    }
    n.b2(k) = p(kOffB2 + k);
  }
}

/// Hidden activations and their derivatives for scaled inputs.
void hidden(const Net & n, const FeatureMatrix & Xs, Eigen::MatrixXd & Hh, Eigen::MatrixXd & D)
{
  Hh = (Xs * n.W1.transpose()).rowwise() + n.b1.transpose();
  if (n.act == Activation::kTanh) {
    Hh = Hh.array().tanh();
    D = 1.0 - Hh.array().square();
  } else {
    D = Eigen::MatrixXd::Ones(Hh.rows(), Hh.cols());
  }
}

Eigen::MatrixXd outputs(const Net & n, const Eigen::MatrixXd & Hh)
{
  return (Hh * n.W2.transpose()).rowwise() + n.b2.transpose();
}

double mse(const Net & n, const FeatureMatrix & Xs, const Eigen::MatrixXd & Y)
{
  Eigen::MatrixXd Hh, D;
  hidden(n, Xs, Hh, D);
  return (outputs(n, Hh) - Y).squaredNorm() / static_cast<double>(Y.size());
}

/// Backpropagated gradient of the MSE over all rows and outputs.
Params backprop(const Net & n, const FeatureMatrix & Xs, const Eigen::MatrixXd & Y)
{
  Eigen::MatrixXd Hh, D;
  hidden(n, Xs, Hh, D);
  const Eigen::MatrixXd dO = (outputs(n, Hh) - Y) * (2.0 / static_cast<double>(Y.size()));
  const Eigen::MatrixXd dH = (dO * n.W2).cwiseProduct(D);
  Net g;
  g.W2 = dO.transpose() * Hh;
  g.b2 = dO.colwise().sum().transpose();
  g.W1 = dH.transpose() * Xs;
  g.b1 = dH.colwise().sum().transpose();
  return pack(g);
}

/// Jacobian of the stacked residual (index kOutputs * row + output).
void jacobian(const Net & n, const FeatureMatrix & Xs, Eigen::MatrixXd & J, Eigen::MatrixXd & Hh)
{
  Eigen::MatrixXd D;
  hidden(n, Xs, Hh, D);
  const Eigen::Index rows = Xs.rows();
  J.setZero(kOutputs * rows, kNNParameters);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (int k = 0; k < kOutputs; ++k) {
      const Eigen::Index r = kOutputs * i + k;
      for (int j = 0; j < kHidden; ++j) {
        const double a = n.W2(k, j) * D(i, j);
        J.block(r, kFeatures * j, 1, kFeatures) = a * Xs.row(i);
        J(r, kOffB1 + j) = a;
        J(r, kOffW2 + kHidden * k + j) = Hh(i, j);
      }
      J(r, kOffB2 + k) = 1.0;
    }
  }
}

Eigen::VectorXd stacked(const Eigen::MatrixXd & E)
{
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R = E;
  return Eigen::Map<const Eigen::VectorXd>(R.data(), R.size());
}

struct RunResult
{
  Net net;
  double best_val = std::numeric_limits<double>::infinity();
  int best_epoch = 0;
  int epochs = 0;
  std::vector<EpochRecord> history;
};

void init_weights(Net & n, std::mt19937_64 & rng, const std::array<bool, kFeatures> & excluded)
{
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double s1 = 1.0 / std::sqrt(static_cast<double>(kFeatures));
  const double s2 = 1.0 / std::sqrt(static_cast<double>(kHidden));
  for (int j = 0; j < kHidden; ++j) {
    for (int m = 0; m < kFeatures; ++m) {
      n.W1(j, m) = s1 * u(rng);
    }
  }
  for (int k = 0; k < kOutputs; ++k) {
    for (int j = 0; j < kHidden; ++j) {
      n.W2(k, j) = s2 * u(rng);
    }
  }
  n.b1.setZero();
  n.b2.setZero();
  for (int m = 0; m < kFeatures; ++m) {
    if (excluded[m]) {
      n.W1.col(m).setZero();
    }
  }
}

RunResult run(
  Net net, const FeatureMatrix & Xt, const Eigen::MatrixXd & Yt,
  const FeatureMatrix & Xv, const Eigen::MatrixXd & Yv, const TrainOptions & opts)
{
  RunResult out;
  out.net = net;
  out.best_val = mse(net, Xv, Yv);
  out.history.push_back({0, mse(net, Xt, Yt), out.best_val});

  Params p = pack(net);
  Params velocity = Params::Zero();
  double mu = opts.mu;
  int since_best = 0;
  const double n_res = static_cast<double>(Yt.size());
  Eigen::MatrixXd J, Hh;
  Eigen::Matrix<double, kNNParameters, kNNParameters> A;

  for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
    double train_mse = 0.0;
    bool stop = false;
    if (opts.optimizer == Optimizer::kMomentum) {
      const Params g = backprop(net, Xt, Yt);
      velocity = opts.momentum * velocity - opts.lr * g;
      p += velocity;
      unpack(p, net);
      train_mse = mse(net, Xt, Yt);
    } else {
      jacobian(net, Xt, J, Hh);
      const Eigen::VectorXd e = stacked(outputs(net, Hh) - Yt);
      const double cost = e.squaredNorm() / n_res;
      A.setZero();
      A.selfadjointView<Eigen::Lower>().rankUpdate(J.transpose());
      A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
      const Params g = J.transpose() * e;
      if (cost < 1e-30 || 2.0 * g.norm() / n_res < 1e-14) {
        break;
      }
      train_mse = cost;
      while (true) {
        Eigen::Matrix<double, kNNParameters, kNNParameters> M = A;
        M.diagonal().array() += mu;
        const Params p_new = p + M.ldlt().solve(-g);
        Net trial = net;
        unpack(p_new, trial);
        const double c_new = mse(trial, Xt, Yt);
        if (std::isfinite(c_new) && c_new < cost) {
          p = p_new;
          net = trial;
          train_mse = c_new;
          mu = std::max(mu / 10.0, 1e-20);
          break;
        }
        mu *= 10.0;
        if (mu > opts.mu_max) {
          stop = true;
          break;
        }
      }
    }
    if (!std::isfinite(train_mse)) {
      throw TrainingError(
              "training loss became non-finite at epoch " + std::to_string(epoch),
              out.history.back().epoch);
    }
    if (stop) {
      break;
    }
    const double val = mse(net, Xv, Yv);
    out.history.push_back({epoch, train_mse, val});
    out.epochs = epoch;
    if (val < out.best_val) {
      out.best_val = val;
      out.best_epoch = epoch;
      out.net = net;
      since_best = 0;
    } else if (++since_best >= opts.patience) {
      break;
    }
  }
  return out;
}

}  // namespace

FeatureVector featurize(const Record & r)
{
  FeatureVector x;
  x(0) = 1e3 * r.q3;
  x(1) = r.q4;
  x(2) = 1e3 * r.m_g;
  x.segment<6>(3) = r.n;
  x.segment<6>(9) = r.n.array().square();
  return x;
}

FeatureMatrix featurize(const Dataset & d)
{
  FeatureMatrix X(static_cast<Eigen::Index>(d.size()), kFeatures);
  for (std::size_t i = 0; i < d.size(); ++i) {
    X.row(static_cast<Eigen::Index>(i)) = featurize(d.rows[i]).transpose();
  }
  return X;
}

TargetMatrix targets(const Dataset & d)
{
  TargetMatrix Y(static_cast<Eigen::Index>(d.size()), kOutputs);
  for (std::size_t i = 0; i < d.size(); ++i) {
    Y.row(static_cast<Eigen::Index>(i)) = to_target_units(d.rows[i].wrench).transpose();
  }
  return Y;
}

Scaler Scaler::fit(const FeatureMatrix & X)
{
  Scaler s;
  if (X.rows() == 0) {
    return s;
  }
  s.mean = X.colwise().mean().transpose();
  for (int m = 0; m < kFeatures; ++m) {
    const double var = (X.col(m).array() - s.mean(m)).square().mean();
    const double sd = std::sqrt(var);
    s.std(m) = sd > 1e-12 * (1.0 + std::abs(s.mean(m))) ? sd : 1.0;
  }
  return s;
}

FeatureVector Scaler::transform(const FeatureVector & x) const
{
  return (x - mean).cwiseQuotient(std);
}

FeatureVector Scaler::inverse(const FeatureVector & z) const
{
  return z.cwiseProduct(std) + mean;
}

FeatureMatrix Scaler::transform(const FeatureMatrix & X) const
{
  return (X.rowwise() - mean.transpose()).array().rowwise() / std.transpose().array();
}

const char * to_string(Activation a)
{
  return a == Activation::kTanh ? "tanh" : "linear";
}

Activation activation_from_string(const std::string & s)
{
  if (s == "tanh") {
    return Activation::kTanh;
  }
  if (s == "linear") {
    return Activation::kLinear;
  }
  throw SchemaError("unknown activation '" + s + "'");
}

const char * to_string(Optimizer o)
{
  return o == Optimizer::kLevenbergMarquardt ? "lm" : "momentum";
}

Optimizer optimizer_from_string(const std::string & s)
{
  if (s == "lm") {
    return Optimizer::kLevenbergMarquardt;
  }
  if (s == "momentum") {
    return Optimizer::kMomentum;
  }
  throw ConfigError("calibration.nn.optimizer", "unknown optimizer '" + s + "'");
}

Eigen::Matrix<double, kNNParameters, 1> NNModel::parameters() const
{
  Net n;
  n.W1 = W1;
  n.b1 = b1;
  n.W2 = W2;
  n.b2 = b2;
  return pack(n);
}

void NNModel::set_parameters(const Eigen::Matrix<double, kNNParameters, 1> & p)
{
  Net n;
  unpack(p, n);
  W1 = n.W1;
  b1 = n.b1;
  W2 = n.W2;
  b2 = n.b2;
}

TargetVector infer(const NNModel & m, const FeatureVector & x)
{
  HiddenVector h = m.W1 * m.scaler.transform(x) + m.b1;
  if (m.activation == Activation::kTanh) {
    h = h.array().tanh();
  }
  return m.W2 * h + m.b2;
}

TargetMatrix infer_batch(const NNModel & m, const FeatureMatrix & X)
{
  TargetMatrix Y(X.rows(), kOutputs);
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    Y.row(i) = infer(m, X.row(i).transpose()).transpose();
  }
  return Y;
}

namespace
{

Net net_of(const NNModel & m)
{
  Net n;
  n.W1 = m.W1;
  n.b1 = m.b1;
  n.W2 = m.W2;
  n.b2 = m.b2;
  n.act = m.activation;
  return n;
}

}  // namespace

double loss(const NNModel & model, const FeatureMatrix & X, const TargetMatrix & Y)
{
  return mse(net_of(model), model.scaler.transform(X), Y);
}

Eigen::Matrix<double, kNNParameters, 1> loss_gradient(
  const NNModel & model, const FeatureMatrix & X, const TargetMatrix & Y)
{
  return backprop(net_of(model), model.scaler.transform(X), Y);
}

TrainResult train(
  const FeatureMatrix & X_train, const TargetMatrix & Y_train,
  const FeatureMatrix & X_val, const TargetMatrix & Y_val, const TrainOptions & opts)
{
  if (X_train.rows() == 0 || X_val.rows() == 0) {
    throw ConfigError("calibration.nn", "training and validation sets must be non-empty");
  }
  if (X_train.rows() != Y_train.rows() || X_val.rows() != Y_val.rows()) {
    throw ConfigError("calibration.nn", "feature and target row counts differ");
  }
  if (opts.max_epochs < 0 || opts.patience < 1 || opts.restarts < 1) {
    throw ConfigError("calibration.nn", "max_epochs >= 0, patience >= 1 and restarts >= 1 required");
  }

  NNModel model;
  model.activation = opts.activation;
  model.scaler = Scaler::fit(X_train);
  if (opts.exclude_mg) {
    model.excluded[kMgFeature] = true;
    model.scaler.mean(kMgFeature) = 0.0;
    model.scaler.std(kMgFeature) = 1.0;
  }

  FeatureMatrix Xt = model.scaler.transform(X_train);
  FeatureMatrix Xv = model.scaler.transform(X_val);
  for (int m = 0; m < kFeatures; ++m) {
    if (model.excluded[m]) {
      Xt.col(m).setZero();
      Xv.col(m).setZero();
    }
  }

  const TargetVector y_mean = Y_train.colwise().mean().transpose();
  TargetVector y_std;
  for (int k = 0; k < kOutputs; ++k) {
    const double sd = std::sqrt((Y_train.col(k).array() - y_mean(k)).square().mean());
    y_std(k) = sd > 1e-12 * (1.0 + std::abs(y_mean(k))) ? sd : 1.0;
  }
  const Eigen::MatrixXd Yt =
    ((Y_train.rowwise() - y_mean.transpose()).array().rowwise() / y_std.transpose().array()).matrix();
  const Eigen::MatrixXd Yv =
    ((Y_val.rowwise() - y_mean.transpose()).array().rowwise() / y_std.transpose().array()).matrix();

  std::mt19937_64 rng(opts.seed);
  RunResult best;
  for (int r = 0; r < opts.restarts; ++r) {
    Net init;
    init.act = opts.activation;
    init_weights(init, rng, model.excluded);
    RunResult res = run(init, Xt, Yt, Xv, Yv, opts);
    if (r == 0 || res.best_val < best.best_val) {
      best = std::move(res);
    }
  }

  model.W1 = best.net.W1;
  model.b1 = best.net.b1;
  model.W2 = y_std.asDiagonal() * best.net.W2;
  model.b2 = y_std.cwiseProduct(best.net.b2) + y_mean;

  model.meta.optimizer = to_string(opts.optimizer);
  model.meta.seed = opts.seed;
  model.meta.epochs = best.epochs;
  model.meta.best_epoch = best.best_epoch;
  model.meta.restarts = opts.restarts;
  model.meta.best_val_mse = best.best_val;
  model.meta.train_rows = static_cast<std::size_t>(X_train.rows());
  model.meta.val_rows = static_cast<std::size_t>(X_val.rows());
  const TargetMatrix E = infer_batch(model, X_val) - Y_val;
  model.meta.val_sigma = E.colwise().squaredNorm().transpose().cwiseSqrt() /
    std::sqrt(static_cast<double>(X_val.rows()));

  return {model, std::move(best.history)};
}

TrainResult train(const Dataset & train_set, const Dataset & val_set, const TrainOptions & opts)
{
  return train(featurize(train_set), targets(train_set), featurize(val_set), targets(val_set), opts);
}

double finite_diff_check(
  const NNModel & model, const FeatureMatrix & X, const TargetMatrix & Y, double eps)
{
  if (!(eps >= 1e-7 && eps <= 1e-3)) {
    throw ConfigError("eps", "must lie in [1e-7, 1e-3]");
  }
  const Params analytic = loss_gradient(model, X, Y);
  const Net base = net_of(model);
  const FeatureMatrix Xs = model.scaler.transform(X);
  const auto predict = [&](const Params & p) {
      Net n = base;
      unpack(p, n);
      Eigen::MatrixXd Hh, D;
      hidden(n, Xs, Hh, D);
      return outputs(n, Hh);
    };
  const Params p0 = pack(base);
  double worst = 0.0;
  for (int i = 0; i < kNNParameters; ++i) {
    Params p = p0;
    p(i) = p0(i) + eps;
    const Eigen::MatrixXd up = predict(p);
    p(i) = p0(i) - eps;
    const Eigen::MatrixXd down = predict(p);
    // Loss difference summed per residual as (a - b)(a + b).
    const double dl = ((up - down).array() * (up + down - 2.0 * Y).array()).sum() /
      static_cast<double>(Y.size());
    const double numeric = dl / (2.0 * eps);
    const double denom = std::max({std::abs(analytic(i)), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic(i) - numeric) / denom);
  }
  return worst;
}

}  // namespace wrench_twin
