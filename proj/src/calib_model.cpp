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

#include "wrench_twin/calib_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/AutoDiff>

#include "wrench_twin/errors.hpp"
#include "wrench_twin/lm.hpp"

namespace wrench_twin
{

namespace
{

constexpr int kMinRows = 42;

using Dual = Eigen::AutoDiffScalar<Eigen::Vector4d>;

struct Problem
{
  Eigen::MatrixXd W;  ///< N x 6 reference wrenches
  Eigen::MatrixXd N;  ///< N x 6 signals
  Eigen::VectorXd q3;
  double l_c;
};

Problem make_problem(const Dataset & d, double l_c)
{
  Problem p;
  const Eigen::Index rows = static_cast<Eigen::Index>(d.size());
  p.W.resize(rows, 6);
  p.N.resize(rows, 6);
  p.q3.resize(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Record & r = d.rows[i];
    p.W.row(i) = r.wrench.transpose();
    p.N.row(i) = r.n.transpose();
    p.q3(i) = r.q3;
  }
  p.l_c = l_c;
  return p;
}

/// U(theta): rows H_c(q3_i) w_i.
Eigen::MatrixXd transfer(const Problem & p, const Eigen::Vector4d & th)
{
  Eigen::MatrixXd U(p.W.rows(), 6);
  for (Eigen::Index i = 0; i < p.W.rows(); ++i) {
    const Matrix6d Hc = build_Hc<double>(th(3) - p.q3(i), th(2), p.l_c, th(0), th(1));
    U.row(i) = (Hc * p.W.row(i).transpose()).transpose();
  }
  return U;
}

/// U(theta) and dU/dtheta_k for k = 0..3.
void transfer_with_derivative(
  const Problem & p, const Eigen::Vector4d & th, Eigen::MatrixXd & U,
  std::array<Eigen::MatrixXd, 4> & dU)
{
  const Eigen::Index rows = p.W.rows();
  U.resize(rows, 6);
  for (auto & m : dU) {
    m.resize(rows, 6);
  }
  const Dual c_x(th(0), 4, 0);
  const Dual c_y(th(1), 4, 1);
  const Dual l(th(2), 4, 2);
  const Dual l_os(th(3), 4, 3);
  const Dual l_c(p.l_c);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Matrix6<Dual> Hc = build_Hc<Dual>(l_os - p.q3(i), l, l_c, c_x, c_y);
    const Vector6<Dual> u = Hc * p.W.row(i).transpose().cast<Dual>();
    for (int j = 0; j < 6; ++j) {
      U(i, j) = u(j).value();
      const Eigen::Vector4d & d = u(j).derivatives();
      for (int k = 0; k < 4; ++k) {
        dU[k](i, j) = d.size() ? d(k) : 0.0;
      }
    }
  }
}

/// Least-squares X = C_m^T for N ~ U X.
Eigen::Matrix<double, 6, 6> inner_solve(const Eigen::MatrixXd & U, const Eigen::MatrixXd & N)
{
  return U.colPivHouseholderQr().solve(N);
}

Eigen::VectorXd stack(const Eigen::MatrixXd & R)
{
  // Row-major stacking: index 6 * row + channel.
  Eigen::MatrixXd Rt = R.transpose();
  return Eigen::Map<Eigen::VectorXd>(Rt.data(), Rt.size());
}

Eigen::Vector4d theta_of(const ModelCalibParams & m)
{
  return {m.c_x, m.c_y, m.l, m.l_os};
}

}  // namespace

Matrix6d ModelCalibParams::Hc(double q3) const
{
  return build_Hc<double>(l_os - q3, l, l_c, c_x, c_y);
}

bool IdentificationBounds::feasible(const Eigen::Vector4d & th) const
{
  return th(3) - q3_max > l_c && th(3) - q3_min < th(2);
}

std::pair<double, double> nominal_compliances(const SensorModel & model)
{
  const double k_s = model.k_s();
  if (!(k_s > 0.0)) {
    throw ConfigError("cannula", "k_s = 0: nominal compliances are unbounded");
  }
  return {6.0 * model.shaft.E * model.shaft.I_xx / k_s, 6.0 * model.shaft.E * model.shaft.I_yy / k_s};
}

IdentificationBounds identification_bounds(
  const SensorModel & model, const Dataset & dataset, const IdentifyOptions & opts)
{
  if (dataset.empty()) {
    throw IdentificationError("empty dataset");
  }
  const auto [c_xn, c_yn] = nominal_compliances(model);
  IdentificationBounds b;
  b.l_c = opts.l_c;
  b.q3_min = std::numeric_limits<double>::infinity();
  b.q3_max = -b.q3_min;
  for (const Record & r : dataset.rows) {
    b.q3_min = std::min(b.q3_min, r.q3);
    b.q3_max = std::max(b.q3_max, r.q3);
  }
  constexpr double kMargin = 1e-6;
  b.lower << 1e-9 * c_xn, 1e-9 * c_yn,
    opts.l_c + (b.q3_max - b.q3_min) + 2.0 * kMargin, opts.l_c + b.q3_max + kMargin;
  b.upper << 2.0 * c_xn * (1.0 - 1e-9), 2.0 * c_yn * (1.0 - 1e-9),
    opts.l_max - kMargin, opts.l_max + b.q3_min - 2.0 * kMargin;
  if (!(b.lower.array() < b.upper.array()).all()) {
    throw IdentificationError(
            "insertion range " + std::to_string(b.q3_max - b.q3_min) +
            " m leaves no admissible (l, l_os) below l_max");
  }
  return b;
}

Eigen::VectorXd residual(const ModelCalibParams & params, const Dataset & dataset)
{
  if (dataset.empty()) {
    throw IdentificationError("empty residual: no rows");
  }
  const Problem p = make_problem(dataset, params.l_c);
  const Eigen::MatrixXd U = transfer(p, theta_of(params));
  return stack(p.N - U * params.C_m.transpose());
}

Matrix6d solve_Cm(const ModelCalibParams & boundary, const Dataset & dataset)
{
  const Problem p = make_problem(dataset, boundary.l_c);
  return inner_solve(transfer(p, theta_of(boundary)), p.N).transpose();
}

FitReport identify(const Dataset & dataset, const SensorModel & model, const IdentifyOptions & opts)
{
  if (opts.n_starts < 1) {
    throw ConfigError("calibration.model.starts", "must be >= 1");
  }
  FitReport report;
  report.seed = opts.seed;

  Dataset used;
  used.sample_rate = dataset.sample_rate;
  for (const Record & r : dataset.rows) {
    bool ok = true;
    if (opts.check_validity) {
      const KinematicState s = r.state(opts.l_os_nominal, opts.l_c);
      ok = s.l_s() > opts.l_c && s.l_s() < model.shaft.l &&
        check_validity(Wrench::from_vector(r.wrench), model, s) == ContactState::kValid;
    }
    if (ok) {
      used.rows.push_back(r);
    }
  }
  report.rows_used = used.size();
  report.rows_excluded = dataset.size() - used.size();
  if (used.size() < static_cast<std::size_t>(kMinRows)) {
    throw IdentificationError(
            "need at least " + std::to_string(kMinRows) + " valid rows, have " +
            std::to_string(used.size()) + " (" + std::to_string(report.rows_excluded) +
            " excluded)");
  }

  const Problem p = make_problem(used, opts.l_c);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> wqr(p.W);
  wqr.setThreshold(1e-10);
  if (wqr.rank() < 6) {
    throw IdentificationError(
            "reference wrenches are rank deficient: rank(W) = " + std::to_string(wqr.rank()) +
            " < 6");
  }

  const IdentificationBounds b = identification_bounds(model, used, opts);
  const double n_res = static_cast<double>(p.N.size());

  LMOptions lm;
  lm.max_iterations = opts.max_iterations;
  lm.ftol = opts.ftol;
  lm.gtol = opts.gtol;

  const ResidualFn varpro = [&p](const Eigen::VectorXd & x, Eigen::VectorXd & r, Eigen::MatrixXd * J) {
      const Eigen::Vector4d th = x;
      if (!J) {
        const Eigen::MatrixXd U = transfer(p, th);
        r = stack(p.N - U * inner_solve(U, p.N));
        return;
      }
      Eigen::MatrixXd U;
      std::array<Eigen::MatrixXd, 4> dU;
      transfer_with_derivative(p, th, U, dU);
      const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(U);
      const Eigen::MatrixXd X = qr.solve(p.N);
      r = stack(p.N - U * X);
      J->resize(r.size(), 4);
      for (int k = 0; k < 4; ++k) {
        // Kaufman's approximation: project dU X off the range of U.
        const Eigen::MatrixXd D = dU[k] * X;
        J->col(k) = -stack(D - U * qr.solve(D));
      }
    };

  const ResidualFn joint = [&p](const Eigen::VectorXd & x, Eigen::VectorXd & r, Eigen::MatrixXd * J) {
      const Eigen::Vector4d th = x.head<4>();
      const Eigen::Matrix<double, 6, 6, Eigen::RowMajor> C =
        Eigen::Map<const Eigen::Matrix<double, 6, 6, Eigen::RowMajor>>(x.data() + 4);
      if (!J) {
        r = stack(p.N - transfer(p, th) * C.transpose());
        return;
      }
      Eigen::MatrixXd U;
      std::array<Eigen::MatrixXd, 4> dU;
      transfer_with_derivative(p, th, U, dU);
      r = stack(p.N - U * C.transpose());
      J->setZero(r.size(), 40);
      for (Eigen::Index i = 0; i < U.rows(); ++i) {
        for (int ch = 0; ch < 6; ++ch) {
          const Eigen::Index row = 6 * i + ch;
          for (int k = 0; k < 4; ++k) {
            (*J)(row, k) = -C.row(ch).dot(dU[k].row(i));
          }
          J->block(row, 4 + 6 * ch, 1, 6) = -U.row(i);
        }
      }
    };

  const FeasibleFn feasible = [&b](const Eigen::VectorXd & x) {
      return b.feasible(x.head<4>());
    };

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double best_cost = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x;

  for (int s = 0; s < opts.n_starts; ++s) {
    Eigen::Vector4d th0;
    int tries = 0;
    do {
      for (int k = 0; k < 4; ++k) {
        th0(k) = b.lower(k) + (b.upper(k) - b.lower(k)) * unit(rng);
      }
      if (++tries > 10000) {
        throw IdentificationError("could not draw a feasible starting point");
      }
    } while (!b.feasible(th0));

    LMResult res;
    if (opts.method == IdentifyMethod::kVariableProjection) {
      res = bounded_lm(varpro, th0, b.lower, b.upper, feasible, lm);
    } else {
      Eigen::VectorXd x0(40), lo(40), hi(40);
      x0.head<4>() = th0;
      const Eigen::Matrix<double, 6, 6, Eigen::RowMajor> C0 =
        inner_solve(transfer(p, th0), p.N).transpose();
      x0.tail<36>() = Eigen::Map<const Eigen::Matrix<double, 36, 1>>(C0.data());
      lo.head<4>() = b.lower;
      hi.head<4>() = b.upper;
      lo.tail<36>().setConstant(-std::numeric_limits<double>::infinity());
      hi.tail<36>().setConstant(std::numeric_limits<double>::infinity());
      res = bounded_lm(joint, x0, lo, hi, feasible, lm);
    }
    const double mse = 2.0 * res.cost / n_res;
    report.starts.push_back({s, res.converged, mse, res.iterations});
    if (res.converged && mse < best_cost) {
      best_cost = mse;
      best_x = res.x;
    }
  }

  if (!std::isfinite(best_cost)) {
    throw IdentificationError(
            "none of " + std::to_string(opts.n_starts) + " starts converged");
  }

  ModelCalibParams best;
  best.c_x = best_x(0);
  best.c_y = best_x(1);
  best.l = best_x(2);
  best.l_os = best_x(3);
  best.l_c = opts.l_c;
  if (opts.method == IdentifyMethod::kVariableProjection) {
    best.C_m = inner_solve(transfer(p, best_x.head<4>()), p.N).transpose();
  } else {
    best.C_m = Eigen::Map<const Eigen::Matrix<double, 6, 6, Eigen::RowMajor>>(best_x.data() + 4);
  }
  report.best = best;
  report.residual_mse = residual(best, used).squaredNorm() / n_res;
  return report;
}

double condition_number(const ModelCalibParams & params, double q3)
{
  const Eigen::JacobiSVD<Matrix6d> svd(params.C_m * params.Hc(q3));
  const auto & sv = svd.singularValues();
  return sv(5) > 0.0 ? sv(0) / sv(5) : std::numeric_limits<double>::infinity();
}

Vector6d predict(
  const ModelCalibParams & params, const SignalVector & n, double q3, double condition_cap)
{
  const Eigen::JacobiSVD<Matrix6d> svd(
    params.C_m * params.Hc(q3), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto & sv = svd.singularValues();
  const double cond = sv(5) > 0.0 ? sv(0) / sv(5) : std::numeric_limits<double>::infinity();
  if (!(cond <= condition_cap)) {
    throw ConditioningError(
            "C_m H_c is ill-conditioned at q3 = " + std::to_string(q3) + " m (cond = " +
            std::to_string(cond) + ")", cond);
  }
  return svd.solve(n);
}

}  // namespace wrench_twin
