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

#ifndef WRENCH_TWIN__LM_HPP_
#define WRENCH_TWIN__LM_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace wrench_twin
{

struct LMOptions
{
  int max_iterations = 500;
  double ftol = 1e-10;   ///< relative cost change
  double gtol = 1e-8;    ///< max cosine between residual and a Jacobian column
  double xtol = 1e-14;   ///< relative step size
  double initial_lambda = 1e-3;
  double max_lambda = 1e16;
};

struct LMResult
{
  Eigen::VectorXd x;
  double cost = 0.0;     ///< 0.5 * |r|^2
  int iterations = 0;
  bool converged = false;
  std::string reason;
  std::vector<double> accepted_costs;
};

/// Residual callback: fills r (and J when non-null) at x.
using ResidualFn =
  std::function<void(const Eigen::VectorXd & x, Eigen::VectorXd & r, Eigen::MatrixXd * J)>;

/// Feasibility predicate for coupled constraints that a box cannot express.
using FeasibleFn = std::function<bool(const Eigen::VectorXd & x)>;

/// Box-constrained Levenberg-Marquardt.
///
/// Marquardt damping with MINPACK-style diagonal scaling; trial points are
/// projected onto [lower, upper] and rejected (with more damping) when
/// infeasible or not decreasing the cost, so accepted costs never increase.
/// Variables with lower == upper are frozen.
inline LMResult bounded_lm(
  const ResidualFn & fn, Eigen::VectorXd x, const Eigen::VectorXd & lower,
  const Eigen::VectorXd & upper, const FeasibleFn & feasible = {},
  const LMOptions & opts = {})
{
  const Eigen::Index n = x.size();
  x = x.cwiseMax(lower).cwiseMin(upper);

  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lower(i) < upper(i)) {
      free.push_back(i);
    }
  }
  const Eigen::Index nf = static_cast<Eigen::Index>(free.size());

  LMResult res;
  Eigen::VectorXd r;
  Eigen::MatrixXd J;
  fn(x, r, &J);
  double cost = 0.5 * r.squaredNorm();
  res.accepted_costs.push_back(cost);
  if (!std::isfinite(cost)) {
    res.x = x;
    res.cost = cost;
    res.reason = "non-finite initial cost";
    return res;
  }
  if (nf == 0) {
    res.x = x;
    res.cost = cost;
    res.converged = true;
    res.reason = "all variables frozen";
    return res;
  }

  double lambda = opts.initial_lambda;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(nf);
  Eigen::VectorXd r_new;

  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    Eigen::MatrixXd Jf(J.rows(), nf);
    for (Eigen::Index k = 0; k < nf; ++k) {
      Jf.col(k) = J.col(free[k]);
    }
    const Eigen::MatrixXd A = Jf.transpose() * Jf;
    const Eigen::VectorXd g = Jf.transpose() * r;

    // Variables on a bound with the gradient pushing outward are held for
    // this iteration; the step is solved over the remaining ones.
    const double rnorm = std::sqrt(2.0 * cost);
    double gmax = 0.0;
    std::vector<Eigen::Index> act;
    for (Eigen::Index k = 0; k < nf; ++k) {
      const Eigen::Index i = free[k];
      const bool blocked = (x(i) <= lower(i) && g(k) > 0.0) || (x(i) >= upper(i) && g(k) < 0.0);
      const double colnorm = std::sqrt(A(k, k));
      if (!blocked) {
        act.push_back(k);
        if (colnorm > 0.0 && rnorm > 0.0) {
          gmax = std::max(gmax, std::abs(g(k)) / (colnorm * rnorm));
        }
      }
      diag(k) = std::max(diag(k), A(k, k));
    }
    if (cost == 0.0 || gmax <= opts.gtol) {
      res.converged = true;
      res.reason = "gradient";
      break;
    }
    const Eigen::Index na = static_cast<Eigen::Index>(act.size());

    bool accepted = false;
    bool done = false;
    while (lambda <= opts.max_lambda) {
      Eigen::MatrixXd M(na, na);
      Eigen::VectorXd rhs(na);
      for (Eigen::Index a = 0; a < na; ++a) {
        rhs(a) = -g(act[a]);
        for (Eigen::Index b = 0; b < na; ++b) {
          M(a, b) = A(act[a], act[b]);
        }
        M(a, a) += lambda * std::max(diag(act[a]), 1e-300);
      }
      const Eigen::VectorXd step = M.ldlt().solve(rhs);
      Eigen::VectorXd x_new = x;
      for (Eigen::Index a = 0; a < na; ++a) {
        const Eigen::Index i = free[act[a]];
        x_new(i) = std::clamp(x(i) + step(a), lower(i), upper(i));
      }
      if (!step.allFinite() || (feasible && !feasible(x_new))) {
        lambda *= 10.0;
        continue;
      }
      fn(x_new, r_new, nullptr);
      const double cost_new = 0.5 * r_new.squaredNorm();
      if (std::isfinite(cost_new) && cost_new < cost) {
        const double dx = (x_new - x).norm();
        const double rel = (cost - cost_new) / cost;
        x = x_new;
        cost = cost_new;
        res.accepted_costs.push_back(cost);
        lambda = std::max(lambda / 10.0, 1e-15);
        accepted = true;
        if (rel < opts.ftol) {
          res.converged = true;
          res.reason = "relative cost change";
          done = true;
        } else if (dx <= opts.xtol * (x.norm() + opts.xtol)) {
          res.converged = true;
          res.reason = "step size";
          done = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left at machine precision.
      res.converged = true;
      res.reason = "no further decrease";
      break;
    }
    if (done) {
      break;
    }
    fn(x, r, &J);
  }
  if (!res.converged) {
    res.reason = "iteration limit";
  }
  res.x = x;
  res.cost = cost;
  return res;
}

}  // namespace wrench_twin

#endif  // WRENCH_TWIN__LM_HPP_
