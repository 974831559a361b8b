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


#include <cmath>
#include <string>

#include <Eigen/QR>
#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "wrench_twin/calib_model.hpp"
#include "wrench_twin/errors.hpp"

namespace wt = wrench_twin;

namespace
{

wt::ModelCalibParams truth(const wt::Config & c)
{
  wt::ModelCalibParams p;
  p.C_m = c.model.clamp_map();
  const auto [cx, cy] = wt::nominal_compliances(c.model);
  p.c_x = cx;
  p.c_y = cy;
  p.l = c.model.shaft.l;
  p.l_os = c.kinematics.l_os;
  p.l_c = c.kinematics.l_c;
  return p;
}

double cost(const wt::ModelCalibParams & p, const wt::Dataset & d)
{
  return wt::residual(p, d).squaredNorm();
}

wt::IdentifyOptions fast_options(int starts)
{
  wt::IdentifyOptions o;
  o.n_starts = starts;
  o.seed = 3;
  return o;
}

class ModelCalibration : public ::testing::Test
{
protected:
  static void SetUpTestSuite()
  {
    quiet_ = new wt::Dataset(
      fixtures::dataset(fixtures::quiet_config(), wt::ProfileKind::kModelBased, 1, {100.0, 2, 30.0}));
    noisy_ = new wt::Dataset(
      fixtures::dataset(wt::default_config(), wt::ProfileKind::kModelBased, 1, {100.0, 2, 30.0}));
  }
  static void TearDownTestSuite()
  {
    delete quiet_;
    delete noisy_;
  }

  static wt::Dataset * quiet_;
  static wt::Dataset * noisy_;
  wt::Config config = fixtures::quiet_config();
};

wt::Dataset * ModelCalibration::quiet_ = nullptr;
wt::Dataset * ModelCalibration::noisy_ = nullptr;

}  // namespace

TEST_F(ModelCalibration, ResidualVanishesAtTheGeneratingParameters)
{
  const Eigen::VectorXd r = wt::residual(truth(config), *quiet_);
  ASSERT_EQ(r.size(), static_cast<Eigen::Index>(6 * quiet_->size()));
  EXPECT_LE(std::sqrt(r.squaredNorm() / r.size()), 1e-10);
}

TEST_F(ModelCalibration, ZeroMapLeavesRawSignals)
{
  wt::ModelCalibParams p = truth(config);
  p.C_m.setZero();
  const Eigen::VectorXd r = wt::residual(p, *quiet_);
  for (std::size_t i = 0; i < quiet_->size(); i += 97) {
    for (int k = 0; k < 6; ++k) {
      ASSERT_EQ(r(6 * i + k), quiet_->rows[i].n(k));
    }
  }
}

TEST_F(ModelCalibration, ShiftedCannulaOffsetRaisesCost)
{
  wt::ModelCalibParams p = truth(config);
  const double base = cost(p, *quiet_);
  p.l_os += 5e-3;
  EXPECT_GT(cost(p, *quiet_), base);
  p.C_m = wt::solve_Cm(p, *quiet_);
  EXPECT_GT(cost(p, *quiet_), base + 1e-12);
}

TEST_F(ModelCalibration, SolveCmMatchesNormalEquations)
{
  wt::ModelCalibParams p = truth(config);
  p.c_x *= 1.3;
  p.l_os -= 0.01;
  const wt::Dataset & d = *noisy_;
  const Eigen::Index n = static_cast<Eigen::Index>(d.size());
  Eigen::MatrixXd U(n, 6), N(n, 6);
  for (Eigen::Index i = 0; i < n; ++i) {
    U.row(i) = (p.Hc(d.rows[i].q3) * d.rows[i].wrench).transpose();
    N.row(i) = d.rows[i].n.transpose();
  }
  const Eigen::MatrixXd ref = (U.transpose() * U).ldlt().solve(U.transpose() * N).transpose();
  const wt::Matrix6d C = wt::solve_Cm(p, d);
  EXPECT_LE((C - ref).cwiseAbs().maxCoeff(), 1e-8 * ref.cwiseAbs().maxCoeff());
  wt::ModelCalibParams q = p;
  q.C_m = C;
  for (int trial = 0; trial < 4; ++trial) {
    wt::ModelCalibParams r = q;
    r.C_m(trial, trial + 1) *= 1.001;
    EXPECT_GT(cost(r, d), cost(q, d));
  }
}

TEST(NominalCompliances, SymmetricTubeAndScaling)
{
  wt::Config c = wt::default_config();
  auto [cx, cy] = wt::nominal_compliances(c.model);
  EXPECT_EQ(cx, cy);
  const double k = c.model.k_s();
  c.model.cannula.l_t /= 2.0;  // doubles k_s
  ASSERT_NEAR(c.model.k_s(), 2.0 * k, 1e-9 * k);
  auto [cx2, cy2] = wt::nominal_compliances(c.model);
  EXPECT_NEAR(cx2, cx / 2.0, 1e-12 * cx);
  EXPECT_NEAR(cy2, cy / 2.0, 1e-12 * cy);
}

TEST(NominalCompliances, HandEvaluatedExample)
{
  // EI = 1e9 * 1e-8 = 10 N m^2; k_l = 3 * 200e9 * 2.25e-12 / 0.03^3 = 5e4 N/m,
  // k_s = (2 * 0.005 / 0.2) k_l = 2.5e3 N/m; 6 EI / k_s = 0.024
  wt::Config c = wt::default_config();
  c.model.shaft = wt::ShaftProperties{1e9, 4e8, 1e-4, 1e-8, 1e-8, 2e-8, 0.035, 0.45};
  c.model.cannula = wt::CannulaConfig{0.20, 0.005, 1.5e-3, 200e9, 1.5e-3, 12e-3, 4e-3, 0.03};
  const auto [cx, cy] = wt::nominal_compliances(c.model);
  EXPECT_NEAR(cx, 0.024, 1e-12);
  EXPECT_NEAR(cy, 0.024, 1e-12);
}

TEST(NominalCompliances, ZeroStiffnessIsAConfigError)
{
  wt::Config c = wt::default_config();
  c.model.cannula.d_o = c.model.cannula.d_i;
  EXPECT_THROW(wt::nominal_compliances(c.model), wt::ConfigError);
}

TEST_F(ModelCalibration, RepeatedRowIsRankDeficient)
{
  wt::Dataset d;
  d.sample_rate = 100.0;
  for (int i = 0; i < 100; ++i) {
    wt::Record r = quiet_->rows[10];
    r.t = i * 0.01;
    d.rows.push_back(r);
  }
  try {
    wt::identify(d, config.model, fast_options(2));
    FAIL() << "expected IdentificationError";
  } catch (const wt::IdentificationError & e) {
    EXPECT_NE(std::string(e.what()).find("rank"), std::string::npos) << e.what();
  }
}

TEST_F(ModelCalibration, TooFewRowsFails)
{
  wt::Dataset d;
  d.rows.assign(quiet_->rows.begin(), quiet_->rows.begin() + 41);
  EXPECT_THROW(wt::identify(d, config.model, fast_options(2)), wt::IdentificationError);
}

TEST_F(ModelCalibration, RecoversTheGeneratingMap)
{
  const auto rep = wt::identify(*quiet_, config.model, fast_options(8));
  EXPECT_EQ(rep.rows_used + rep.rows_excluded, quiet_->size());
  EXPECT_LT(rep.residual_mse, 1e-20);
  const wt::ModelCalibParams t = truth(config);
  EXPECT_NEAR(rep.best.l, t.l, 1e-6);
  EXPECT_NEAR(rep.best.l_os, t.l_os, 1e-6);
  EXPECT_NEAR(rep.best.c_x, t.c_x, 1e-4 * t.c_x);
  EXPECT_NEAR(rep.best.c_y, t.c_y, 1e-4 * t.c_y);
}

TEST_F(ModelCalibration, ParametersRespectTheBox)
{
  const wt::IdentifyOptions o = fast_options(8);
  const auto rep = wt::identify(*noisy_, config.model, o);
  const auto b = wt::identification_bounds(config.model, *noisy_, o);
  const Eigen::Vector4d th(rep.best.c_x, rep.best.c_y, rep.best.l, rep.best.l_os);
  EXPECT_TRUE((th.array() >= b.lower.array()).all());
  EXPECT_TRUE((th.array() <= b.upper.array()).all());
  EXPECT_TRUE(b.feasible(th));
  EXPECT_GT(rep.best.l, 0.0);
  EXPECT_LT(rep.best.l, o.l_max);
  EXPECT_GT(rep.best.c_x, 0.0);
  EXPECT_GT(rep.best.c_y, 0.0);
}

TEST_F(ModelCalibration, VariableProjectionAgreesWithJointSolve)
{
  wt::IdentifyOptions o = fast_options(8);
  const auto vp = wt::identify(*noisy_, config.model, o);
  o.method = wt::IdentifyMethod::kJoint;
  const auto joint = wt::identify(*noisy_, config.model, o);
  EXPECT_NEAR(joint.residual_mse, vp.residual_mse, 1e-6 * vp.residual_mse);
  EXPECT_NEAR(joint.best.l_os, vp.best.l_os, 1e-4);
  EXPECT_NEAR(joint.best.l, vp.best.l, 1e-4);
}

TEST_F(ModelCalibration, MoreStartsNeverWorsenTheBest)
{
  const auto few = wt::identify(*noisy_, config.model, fast_options(3));
  const auto many = wt::identify(*noisy_, config.model, fast_options(12));
  EXPECT_LE(many.residual_mse, few.residual_mse);
  ASSERT_EQ(many.starts.size(), 12u);
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(many.starts[i].cost, few.starts[i].cost);
  }
}

TEST_F(ModelCalibration, FitIsDeterministic)
{
  const auto a = wt::identify(*noisy_, config.model, fast_options(4));
  const auto b = wt::identify(*noisy_, config.model, fast_options(4));
  EXPECT_EQ(a.best.C_m, b.best.C_m);
  EXPECT_EQ(a.best.l_os, b.best.l_os);
  EXPECT_EQ(a.residual_mse, b.residual_mse);
}

TEST_F(ModelCalibration, PredictInvertsTheForwardMap)
{
  const wt::ModelCalibParams p = truth(config);
  EXPECT_EQ(wt::predict(p, wt::SignalVector::Zero(), 0.1), wt::Vector6d::Zero());
  for (std::size_t i = 0; i < quiet_->size(); i += 211) {
    const auto & r = quiet_->rows[i];
    const wt::Vector6d w = wt::predict(p, r.n, r.q3);
    EXPECT_LE((w - r.wrench).norm(), 1e-8 * r.wrench.norm());
  }
}

TEST_F(ModelCalibration, ConditionNumberIsReportedAndCapped)
{
  const wt::ModelCalibParams p = truth(config);
  for (double q3 = 0.06; q3 <= 0.22; q3 += 0.04) {
    const double k = wt::condition_number(p, q3);
    EXPECT_TRUE(std::isfinite(k));
    EXPECT_GT(k, 1.0);
  }
  try {
    wt::predict(p, wt::SignalVector::Ones() * 1e-3, 0.1, 1.0);
    FAIL() << "expected ConditioningError";
  } catch (const wt::ConditioningError & e) {
    EXPECT_NEAR(e.condition_number(), wt::condition_number(p, 0.1), 1e-6 * e.condition_number());
  }
}
