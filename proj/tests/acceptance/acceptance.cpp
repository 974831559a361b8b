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


// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "beam_oracles.hpp"
#include "fixtures.hpp"
#include "wrench_twin/calibration.hpp"
#include "wrench_twin/dataset_io.hpp"
#include "wrench_twin/metrics.hpp"
#include "wrench_twin/scenarios.hpp"

namespace wt = wrench_twin;

namespace
{

struct Outcome
{
  bool pass = false;
  std::string detail;
};

std::string fmt(const char * f, double v)
{
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

std::string percent_list(const wt::EvaluationReport & r)
{
  std::string s;
  for (const auto & a : r.axes) {
    s += a.name + " " + fmt(a.nrmsd < 1e-5 ? "%.1e%%" : "%.3f%%", 100.0 * a.nrmsd) + " ";
  }
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_rel(const oracle::Matrix6 & a, const oracle::Matrix6 & ref)
{
  const double floor = 1e-12 * ref.cwiseAbs().maxCoeff();
  double worst = 0.0;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      const double d = std::abs(a(i, j) - ref(i, j));
      if (ref(i, j) != 0.0) {
        worst = std::max(worst, d / std::abs(ref(i, j)));
      } else if (d > floor) {
        worst = std::max(worst, 1.0);
      }
    }
  }
  return worst;
}

// Shared state between criteria.
struct Context
{
  wt::Config quiet = fixtures::quiet_config();
  wt::Config noisy = wt::default_config();
  std::optional<wt::ModelCalibration> model;
  std::optional<wt::Partition> nn_noisy;
  std::optional<wt::NNModel> nn_noisy_model;
};

wt::Partition nn_partition(const wt::Config & c, std::uint64_t seed)
{
  const wt::Dataset d =
    fixtures::dataset(c, wt::ProfileKind::kDataDriven, seed,
      {c.data_driven.profile.sample_rate, c.data_driven.profile.cycles,
        c.data_driven.profile.cycle_duration});
  return wt::split(wt::subsample(d, c.nn.subsample_rate), c.nn.split);
}

Outcome optics_linearity()
{
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double kappa = 1e-7 * std::pow(100.0, u(rng));
    const double g = 1e-5 + 1e-3 * u(rng);
    const double s = g + 1e-5 + 2e-3 * u(rng);
    const wt::OpticalUnitParams p(kappa, s, g);
    const double c = p.half_margin();
    const double delta = c * (2.0 * u(rng) - 1.0);
    const auto I = wt::photocurrents(delta, p);
    worst = std::max(worst, std::abs(wt::normalize(I.i1, I.i2) - delta / c));
  }
  const double t = seconds_since(t0);
  return {worst <= 1e-12 && t < 1.0,
    "max |n - delta/c| = " + fmt("%.2e", worst) + " (full scale 1), " + fmt("%.3f s", t)};
}

Outcome beam_oracles()
{
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst_w = 0.0, worst_c = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double E = 5e10 + 2e11 * u(rng);
    const double G = E / (2.0 * (1.0 + 0.25 + 0.1 * u(rng)));
    const double od = 4e-3 + 8e-3 * u(rng);
    const double id = od * (0.3 + 0.6 * u(rng));
    const double A = M_PI / 4.0 * (od * od - id * id);
    const double I_xx = M_PI / 64.0 * (std::pow(od, 4) - std::pow(id, 4));
    const double I_yy = I_xx * (0.8 + 0.4 * u(rng));
    const double J = I_xx + I_yy;
    const double H = 0.01 + 0.09 * u(rng);
    const double l = 0.3 + 0.3 * u(rng);
    const double l_c = 0.02 + 0.03 * u(rng);
    const double l_s = l_c + 0.01 + (l - l_c - 0.02) * u(rng);
    const double k = std::pow(10.0, 4.0 * u(rng));
    const wt::ShaftProperties sh{E, G, A, I_xx, I_yy, J, H, l};
    worst_w = std::max(worst_w,
      max_rel(wt::build_Hw(sh), oracle::sensing_compliance(E, G, A, I_xx, I_yy, J, H)));
    const wt::KinematicState st{0.3 - l_s, 0, 0, 0, 0, 0, 0.3, l_c};
    worst_c = std::max(worst_c,
      max_rel(wt::build_Hc(st, sh, k), oracle::boundary_transfer(E * I_xx, E * I_yy, k, l, l_s, l_c)));
  }
  const double t = seconds_since(t0);
  return {worst_w <= 1e-6 && worst_c <= 1e-6 && t < 10.0,
    "H_w vs curvature quadrature " + fmt("%.2e", worst_w) + ", H_c vs supported-beam FE " +
    fmt("%.2e", worst_c) + " (max relative), " + fmt("%.2f s", t)};
}

Outcome forward_structure(const Context & ctx)
{
  const wt::SensorModel & m = ctx.quiet.model;
  const wt::ForwardOptions raw{false, false};
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0), q3(0.0, 0.2);
  bool torsion_ok = true, rows_ok = true;
  double super = 0.0;
  for (int i = 0; i < 200; ++i) {
    const wt::KinematicState st{q3(rng), 0, 0, 0, 0, 0, 0.30, 0.035};
    wt::Wrench w;
    w.moment.z() = 0.1 * u(rng);
    const wt::SignalVector n = wt::forward(w, m, st, raw);
    torsion_ok = torsion_ok && n(1) == 0.0 && n(3) == 0.0 && n(5) == 0.0 &&
      std::abs(n(0) - n(2)) <= 1e-15 * std::abs(n(0)) && std::abs(n(0) - n(4)) <= 1e-15 * std::abs(n(0));
    const wt::Matrix6d Hc = wt::build_Hc(st, m.shaft, m.k_s() * (1.0 + u(rng)));
    rows_ok = rows_ok && Hc.row(2) == wt::Vector6d::Unit(2).transpose() &&
      Hc.row(5) == wt::Vector6d::Unit(5).transpose();
    wt::Vector6d a, b;
    for (int k = 0; k < 6; ++k) {
      a(k) = u(rng) * (k < 3 ? 3.0 : 0.08);
      b(k) = u(rng) * (k < 3 ? 3.0 : 0.08);
    }
    const wt::SignalVector s = wt::forward(wt::Wrench::from_vector(a + b), m, st, raw);
    const wt::SignalVector d = s - wt::forward(wt::Wrench::from_vector(a), m, st, raw) -
      wt::forward(wt::Wrench::from_vector(b), m, st, raw);
    super = std::max(super, d.cwiseAbs().maxCoeff() / s.cwiseAbs().maxCoeff());
  }
  return {torsion_ok && rows_ok && super <= 1e-12,
    std::string("torsion on units 1,3,5 only ") + (torsion_ok ? "yes" : "no") +
    ", H_c rows 3/6 unit " + (rows_ok ? "yes" : "no") + ", superposition " + fmt("%.1e", super)};
}

Outcome model_round_trip(Context & ctx)
{
  const auto t0 = std::chrono::steady_clock::now();
  const wt::Config & c = ctx.quiet;
  const auto & pp = c.model_based.profile;
  const wt::Dataset full = wt::subsample(
    fixtures::dataset(c, wt::ProfileKind::kModelBased, 7, {pp.sample_rate, pp.cycles, pp.cycle_duration}),
    100.0);
  const wt::Partition p = wt::split(full, wt::SplitScheme::cycles(1, 0, 1));
  wt::IdentifyOptions o = c.identify;
  o.n_starts = 32;
  const wt::FitReport fit = wt::identify(p.train, c.model, o);
  wt::ModelCalibration mc;
  mc.params = fit.best;
  mc.fit = fit;
  const wt::EvaluationReport ev = wt::evaluate(mc, p.test);
  mc.validation_sigma = wt::TargetVector::Zero();
  for (int k = 0; k < wt::kOutputs; ++k) {
    mc.validation_sigma(k) = ev.axes[k].sigma;
  }
  ctx.model = mc;
  bool ok = full.size() >= 5000;
  for (const auto & a : ev.axes) {
    ok = ok && a.nrmsd < 1e-3;
  }
  const double t = seconds_since(t0);
  ok = ok && t < 300.0;
  return {ok, std::to_string(full.size()) + " rows, 32 starts, held-out NRMSD " + percent_list(ev) +
    fmt("%.1f s", t)};
}

Outcome gradient_check(const Context & ctx)
{
  const wt::Dataset d =
    fixtures::dataset(ctx.noisy, wt::ProfileKind::kDataDriven, 5, {100.0, 1, 2.0});
  const wt::FeatureMatrix X = wt::featurize(d).topRows(40);
  const wt::TargetMatrix Y = wt::targets(d).topRows(40);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g(0.0, 0.5);
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    wt::NNModel m;
    m.scaler = wt::Scaler::fit(X);
    Eigen::Matrix<double, wt::kNNParameters, 1> p;
    for (int i = 0; i < wt::kNNParameters; ++i) {
      p(i) = g(rng);
    }
    m.set_parameters(p);
    worst = std::max(worst, wt::finite_diff_check(m, X, Y, 1e-5));
  }
  return {worst <= 1e-5, "max relative gradient error over 20 models " + fmt("%.2e", worst)};
}

Outcome nn_round_trip(Context & ctx)
{
  auto t0 = std::chrono::steady_clock::now();
  const wt::Partition clean = nn_partition(ctx.quiet, 7);
  const auto clean_fit = wt::train(clean.train, clean.val, ctx.quiet.nn.train);
  const wt::EvaluationReport ec = wt::evaluate(clean_fit.model, clean.test);
  const double t_clean = seconds_since(t0);
  bool ok = t_clean < 120.0;
  for (const auto & a : ec.axes) {
    ok = ok && a.nrmsd <= 0.02;
  }

  t0 = std::chrono::steady_clock::now();
  ctx.nn_noisy = nn_partition(ctx.noisy, 7);
  const auto noisy_fit = wt::train(ctx.nn_noisy->train, ctx.nn_noisy->val, ctx.noisy.nn.train);
  ctx.nn_noisy_model = noisy_fit.model;
  const wt::EvaluationReport en = wt::evaluate(noisy_fit.model, ctx.nn_noisy->test);
  const double t_noisy = seconds_since(t0);
  ok = ok && t_noisy < 120.0 && en.axes[0].nrmsd <= 0.05 && en.axes[1].nrmsd <= 0.05 &&
    en.axes[4].nrmsd <= 0.03;
  return {ok, "noiseless " + percent_list(ec) + fmt("(%.1f s); ", t_clean) + "disturbed " +
    percent_list(en) + fmt("(%.1f s)", t_noisy)};
}

Outcome jaw_ablation(const Context & ctx)
{
  wt::TrainOptions o = ctx.noisy.nn.train;
  o.exclude_mg = true;
  const auto ablated = wt::train(ctx.nn_noisy->train, ctx.nn_noisy->val, o);
  const wt::EvaluationReport with = wt::evaluate(*ctx.nn_noisy_model, ctx.nn_noisy->test);
  const wt::EvaluationReport without = wt::evaluate(ablated.model, ctx.nn_noisy->test);
  const double rfx = without.axes[0].sigma / with.axes[0].sigma;
  const double rmy = without.axes[3].sigma / with.axes[3].sigma;
  return {rfx >= 5.0 && rmy >= 5.0,
    "rms error ratio without/with m_g: fx " + fmt("%.1fx", rfx) + ", my " + fmt("%.1fx", rmy)};
}

Outcome overcoat(const Context & ctx)
{
  const wt::ScenarioRig rig = ctx.noisy.rig();
  wt::OvercoatOptions o = ctx.noisy.overcoat;
  o.coupling = 0.0;
  const wt::OvercoatReport quiet = wt::overcoat_scenario(rig, *ctx.model, o);
  double worst = 0.0;
  for (const auto & a : quiet.axes) {
    worst = std::max(worst, a.rms / a.noise_floor);
  }
  o.noise = false;
  o.coupling = 1e-3;
  const wt::OvercoatReport a = wt::overcoat_scenario(rig, *ctx.model, o);
  o.coupling = 2e-3;
  const wt::OvercoatReport b = wt::overcoat_scenario(rig, *ctx.model, o);
  const double lin = (b.excess - 2.0 * a.excess).cwiseAbs().maxCoeff() / b.excess.cwiseAbs().maxCoeff();
  const bool ok = quiet.pass && lin <= 1e-9 && a.saturated_rows == 0 && b.saturated_rows == 0;
  return {ok, "coupling 0: worst rms/noise floor " + fmt("%.2f", worst) + " (limit 3); " +
    "linearity deviation at 2x coupling " + fmt("%.1e", lin)};
}

Outcome metrics_exactness()
{
  Eigen::VectorXd ref(2), pred(2);
  ref << 0, 10;
  pred << 1, 9;
  const double n = wt::nrmsd(pred, ref);
  bool ok = std::abs(n - 0.10) <= 1e-15;
  const Eigen::VectorXd r = Eigen::VectorXd::LinSpaced(40, -2.0, 5.0);
  ok = ok && wt::r_squared(r, r) == 1.0 && wt::rms_error(r, r) == 0.0;
  Eigen::VectorXd p = r;
  p(7) += 1e-3;
  ok = ok && wt::r_squared(p, r) < 1.0 && wt::rms_error(p, r) > 0.0;
  Eigen::VectorXd q = r + 0.1 * Eigen::VectorXd::LinSpaced(40, 1.0, -1.0).array().sin().matrix();
  const double base = wt::nrmsd(q, r);
  double hom = 0.0;
  for (double a : {1e-3, 2.5, -4.0, 1e5}) {
    hom = std::max(hom, std::abs(wt::nrmsd(a * q, a * r) - base) / base);
  }
  ok = ok && hom <= 1e-12;
  return {ok, "nrmsd([1,9],[0,10]) = " + fmt("%.17g", n) + ", scaling deviation " + fmt("%.1e", hom)};
}

Outcome determinism(const Context & ctx)
{
  const auto csv = [&](std::uint64_t seed) {
      std::ostringstream os;
      wt::write_csv(os, fixtures::dataset(ctx.noisy, wt::ProfileKind::kDataDriven, seed, {1500.0, 2, 3.0}));
      return os.str();
    };
  const bool data = csv(21) == csv(21);

  const wt::Dataset mb = wt::subsample(
    fixtures::dataset(ctx.noisy, wt::ProfileKind::kModelBased, 22, {1500.0, 1, 20.0}), 100.0);
  const auto model_file = [&]() {
      wt::IdentifyOptions o = ctx.noisy.identify;
      o.n_starts = 4;
      wt::ModelCalibration m;
      m.fit = wt::identify(mb, ctx.noisy.model, o);
      m.params = m.fit->best;
      return wt::to_json(wt::CalibrationFile{m, wt::config_hash(ctx.noisy)}).dump();
    };
  const bool model = model_file() == model_file();

  const wt::Partition & p = *ctx.nn_noisy;
  const auto nn_file = [&]() {
      wt::TrainOptions o = ctx.noisy.nn.train;
      o.max_epochs = 60;
      const wt::NNModel m = wt::train(p.train, p.val, o).model;
      return wt::to_json(wt::CalibrationFile{m, wt::config_hash(ctx.noisy)}).dump();
    };
  const bool nn = nn_file() == nn_file();

  const auto report = [&]() {
      const wt::EvaluationReport e = wt::evaluate(*ctx.nn_noisy_model, p.test);
      wt::OvercoatOptions o = ctx.noisy.overcoat;
      o.duration = 3.0;
      const auto oc = wt::overcoat_scenario(ctx.noisy.rig(), *ctx.model, o);
      wt::WristOptions w = ctx.noisy.wrist;
      w.segment_duration = 2.0;
      const auto wr = wt::wrist_scenario(ctx.noisy.rig(), *ctx.nn_noisy_model, w);
      return wt::to_json(e).dump() + wt::plot_csv(e) + wt::to_json(oc).dump() +
             wt::plot_csv(oc.t, oc.excess) + wt::to_json(wr).dump() + wt::plot_csv(wr.t, wr.resolved);
    };
  const bool reports = report() == report();
  const auto yn = [](bool b) {return b ? "identical" : "DIFFER";};
  return {data && model && nn && reports, std::string("datasets ") + yn(data) + ", model files " +
    yn(model) + ", network files " + yn(nn) + ", reports " + yn(reports)};
}

}  // namespace

int main()
{
  Context ctx;
  struct Item
  {
    int id;
    const char * name;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items = {
    {1, "optics linearity", [] {return optics_linearity();}},
    {2, "beam oracle equivalence", [] {return beam_oracles();}},
    {3, "forward-map structure", [&] {return forward_structure(ctx);}},
    {4, "model-based round trip", [&] {return model_round_trip(ctx);}},
    {5, "gradient correctness", [&] {return gradient_check(ctx);}},
    {6, "network round trip", [&] {return nn_round_trip(ctx);}},
    {7, "jaw ablation", [&] {return jaw_ablation(ctx);}},
    {8, "overcoat property", [&] {return overcoat(ctx);}},
    {9, "metrics exactness", [] {return metrics_exactness();}},
    {10, "determinism", [&] {return determinism(ctx);}},
  };
  int failed = 0;
  for (const Item & it : items) {
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception & e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("criterion %2d %-26s %s  %s\n", it.id, it.name, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(items.size()) - failed, items.size());
  return failed == 0 ? 0 : 1;
}
