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


#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "wrench_twin/calibration.hpp"
#include "wrench_twin/errors.hpp"

namespace wt = wrench_twin;

namespace
{

wt::ModelCalibration model_calibration()
{
  const wt::Config c = wt::default_config();
  const wt::Dataset d =
    fixtures::dataset(c, wt::ProfileKind::kModelBased, 2, {100.0, 1, 20.0});
  wt::IdentifyOptions o;
  o.n_starts = 2;
  wt::ModelCalibration m;
  m.fit = wt::identify(d, c.model, o);
  m.params = m.fit->best;
  m.validation_sigma << 0.1, 0.2, 3.0, 4.0, 0.5;
  return m;
}

wt::NNModel nn_model()
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  wt::NNModel m;
  Eigen::Matrix<double, wt::kNNParameters, 1> p;
  for (int i = 0; i < wt::kNNParameters; ++i) {
    p(i) = g(rng) / 3.0;
  }
  m.set_parameters(p);
  for (int i = 0; i < wt::kFeatures; ++i) {
    m.scaler.mean(i) = g(rng);
    m.scaler.std(i) = 0.5 + std::abs(g(rng));
  }
  m.excluded[wt::kMgFeature] = true;
  m.meta.seed = 9;
  m.meta.val_sigma << 1, 2, 3, 4, 5;
  return m;
}

wt::Record sample_row()
{
  wt::Record r;
  r.q3 = 0.12;
  r.q4 = 0.2;
  r.m_g = 0.01;
  r.n << 0.01, -0.02, 0.015, 0.03, -0.01, 0.005;
  return r;
}

std::string dump_roundtrip(const wt::CalibrationFile & f)
{
  const std::string text = wt::to_json(f).dump();
  return wt::to_json(wt::calibration_from_json(nlohmann::json::parse(text))).dump();
}

}  // namespace

TEST(CalibrationFile, ModelRoundTripIsBitExact)
{
  const wt::CalibrationFile f{model_calibration(), "0123456789abcdef"};
  EXPECT_EQ(dump_roundtrip(f), wt::to_json(f).dump());
  const auto back = wt::calibration_from_json(wt::to_json(f));
  const auto & m = std::get<wt::ModelCalibration>(back.calibration);
  const auto & o = std::get<wt::ModelCalibration>(f.calibration);
  EXPECT_EQ(m.params.C_m, o.params.C_m);
  EXPECT_EQ(m.params.l_os, o.params.l_os);
  EXPECT_EQ(m.validation_sigma, o.validation_sigma);
  EXPECT_EQ(back.config_hash, f.config_hash);
  EXPECT_EQ(back.tool_version, wt::kToolVersion);
}

TEST(CalibrationFile, NetworkRoundTripIsBitExact)
{
  const wt::CalibrationFile f{nn_model(), "fedcba9876543210"};
  EXPECT_EQ(dump_roundtrip(f), wt::to_json(f).dump());
  const auto back = wt::calibration_from_json(wt::to_json(f));
  const auto & n = std::get<wt::NNModel>(back.calibration);
  const auto & o = std::get<wt::NNModel>(f.calibration);
  EXPECT_EQ(n.parameters(), o.parameters());
  EXPECT_EQ(n.scaler.std, o.scaler.std);
  EXPECT_EQ(n.excluded, o.excluded);
  const wt::Record r = sample_row();
  EXPECT_EQ(wt::resolve(back.calibration, r), wt::resolve(f.calibration, r));
}

TEST(CalibrationFile, SchemaChecks)
{
  nlohmann::json j = wt::to_json(wt::CalibrationFile{nn_model(), "x"});
  j["schema"] = "wrench-twin/v2";
  EXPECT_THROW(wt::calibration_from_json(j), wt::SchemaError);
  j = wt::to_json(wt::CalibrationFile{nn_model(), "x"});
  j.erase("config_hash");
  EXPECT_THROW(wt::calibration_from_json(j), wt::SchemaError);
  EXPECT_THROW(wt::calibration_from_json(nlohmann::json::array()), wt::SchemaError);
}

TEST(Resolve, ModelUsesTheInverseMap)
{
  const wt::ModelCalibration m = model_calibration();
  const wt::Record r = sample_row();
  EXPECT_EQ(wt::resolve(m, r), wt::to_target_units(wt::predict(m.params, r.n, r.q3)));
  EXPECT_STREQ(wt::kind_name(m), "model");
  EXPECT_EQ(wt::validation_sigma(m), m.validation_sigma);
}

TEST(ResolveJacobian, MatchesCentralDifferences)
{
  for (const wt::Calibration & c : {wt::Calibration{model_calibration()}, wt::Calibration{nn_model()}}) {
    const wt::Record r = sample_row();
    const auto J = wt::resolve_jacobian(c, r);
    const double h = 1e-6;
    for (int i = 0; i < 6; ++i) {
      wt::Record up = r, down = r;
      up.n(i) += h;
      down.n(i) -= h;
      const wt::TargetVector fd = (wt::resolve(c, up) - wt::resolve(c, down)) / (2.0 * h);
      EXPECT_LE((J.col(i) - fd).cwiseAbs().maxCoeff(), 1e-6 * (1.0 + J.col(i).cwiseAbs().maxCoeff()))
        << wt::kind_name(c) << " column " << i;
    }
  }
}
