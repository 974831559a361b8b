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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "wrench_twin/calibration.hpp"
#include "wrench_twin/config.hpp"
#include "wrench_twin/dataset_io.hpp"
#include "wrench_twin/errors.hpp"
#include "wrench_twin/metrics.hpp"
#include "wrench_twin/scenarios.hpp"
#include "wrench_twin/simulator.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace wrench_twin;

namespace
{

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

struct Loaded
{
  Config config;
  std::string hash;
};

Loaded load(const std::string & path)
{
  Config c = path.empty() ? config_from_json(json::object()) : load_config(path);
  return {c, config_hash(c)};
}

json provenance(const Loaded & l)
{
  return {{"schema", kSchema}, {"tool_version", kToolVersion}, {"config_hash", l.hash}};
}

void write_text(const fs::path & path, const std::string & text)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError(path.string(), "cannot open for writing");
  }
  out << text;
}

void ensure_dir(const fs::path & dir)
{
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw ConfigError(dir.string(), "cannot create directory: " + ec.message());
  }
}

void print_metrics(const char * label, const EvaluationReport & r)
{
  std::printf("%s NRMSD %%:", label);
  for (const AxisMetrics & m : r.axes) {
    std::printf(" %s=%.4f", m.name.c_str(), 100.0 * m.nrmsd);
  }
  std::printf("\n");
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs
{
  std::string kind = "data-driven";
  std::uint64_t seed = 7;
  std::string out;
  std::string config;
  bool force_invalid = false;
};

int cmd_simulate(const SimulateArgs & a)
{
  const Loaded l = load(a.config);
  const ProfileKind kind =
    a.kind == "model-based" ? ProfileKind::kModelBased : ProfileKind::kDataDriven;
  const ProfileSettings & ps = l.config.settings(kind);

  const MotionProfile profile =
    gen_profile(kind, a.seed, ps.profile, l.config.kinematics, l.config.model.shaft.l);
  const std::vector<Vector6d> wrench = gen_wrench_trajectory(kind, a.seed, profile, ps.wrench);
  SimulateOptions so;
  so.validity = a.force_invalid ? ValidityPolicy::kKeepAll : ps.validity;
  SimulationResult sim = simulate(
    profile, wrench, l.config.model, l.config.kinematics, l.config.disturbances, a.seed, so);
  sim.dataset.meta = {to_string(kind), a.seed, l.hash};

  const fs::path dir(a.out);
  ensure_dir(dir);
  write_csv((dir / "data.csv").string(), sim.dataset);
  json meta = provenance(l);
  meta["kind"] = to_string(kind);
  meta["seed"] = a.seed;
  meta["sample_rate_Hz"] = sim.dataset.sample_rate;
  meta["rows"] = sim.dataset.size();
  meta["cycles"] = sim.dataset.cycle_count();
  meta["validity_policy"] = a.force_invalid ? "keep-all" : "config";
  meta["stats"] = {
    {"valid", sim.stats.valid},
    {"no_contact", sim.stats.no_contact},
    {"double_contact", sim.stats.double_contact},
    {"dropped", sim.stats.dropped},
    {"saturated", sim.stats.saturated}};
  meta["config"] = config_to_json(l.config);
  write_json((dir / "meta.json").string(), meta);

  std::printf(
    "rows: %zu  valid: %zu  no-contact: %zu  double-contact: %zu  dropped: %zu  saturated: %zu\n",
    sim.dataset.size(), sim.stats.valid, sim.stats.no_contact, sim.stats.double_contact,
    sim.stats.dropped, sim.stats.saturated);
  return 0;
}

// ---------------------------------------------------------------- calibrate

struct CalibrateArgs
{
  std::string mode = "nn";
  std::string data;
  std::string out;
  std::string config;
  std::optional<int> starts;
  std::optional<double> subsample;
  std::optional<std::uint64_t> seed;
  bool no_mg = false;
};

Dataset cycles_in(const Dataset & d, int first, int last)
{
  Dataset out;
  out.sample_rate = d.sample_rate;
  out.meta = d.meta;
  for (const Record & r : d.rows) {
    if (r.cycle >= first && r.cycle <= last) {
      out.rows.push_back(r);
    }
  }
  return out;
}

int cmd_calibrate(const CalibrateArgs & a)
{
  const Loaded l = load(a.config);
  const Config & c = l.config;
  Dataset data = read_csv(a.data);
  CalibrationFile file;
  file.config_hash = l.hash;

  if (a.mode == "model") {
    if (a.subsample) {
      data = subsample(data, *a.subsample);
    }
    IdentifyOptions io = c.identify;
    if (a.starts) {
      io.n_starts = *a.starts;
    }
    if (a.seed) {
      io.seed = *a.seed;
    }
    const Dataset train = cycles_in(data, 1, c.model_train_cycles);
    const Dataset held = cycles_in(data, c.model_train_cycles + 1, data.cycle_count());
    const FitReport fit = identify(train, c.model, io);
    ModelCalibration mc;
    mc.params = fit.best;
    mc.condition_cap = c.condition_cap;
    mc.fit = fit;
    file.calibration = mc;
    const EvaluationReport tr = evaluate(file.calibration, train);
    print_metrics("train", tr);
    const EvaluationReport vr = held.size() >= 2 ? evaluate(file.calibration, held) : tr;
    if (held.size() >= 2) {
      print_metrics("val", vr);
    }
    for (int k = 0; k < kOutputs; ++k) {
      mc.validation_sigma(k) = vr.axes[k].sigma;
    }
    file.calibration = mc;
    std::printf(
      "rows used: %zu  excluded: %zu  residual mse: %.6g\n", fit.rows_used, fit.rows_excluded,
      fit.residual_mse);
  } else {
    TrainOptions to = c.nn.train;
    if (a.seed) {
      to.seed = *a.seed;
    }
    to.exclude_mg = to.exclude_mg || a.no_mg;
    data = subsample(data, a.subsample.value_or(c.nn.subsample_rate));
    const Partition p = split(data, c.nn.split);
    const TrainResult tr = train(p.train, p.val, to);
    file.calibration = tr.model;
    print_metrics("train", evaluate(file.calibration, p.train));
    print_metrics("val", evaluate(file.calibration, p.val));
    std::ostringstream hist;
    hist << "epoch,train_mse,val_mse\n";
    for (const EpochRecord & e : tr.history) {
      hist << e.epoch << ',' << format_double(e.train_mse) << ',' << format_double(e.val_mse) << '\n';
    }
    write_text(a.out + ".history.csv", hist.str());
    std::printf("epochs: %d  best epoch: %d\n", tr.model.meta.epochs, tr.model.meta.best_epoch);
  }
  save_calibration(a.out, file);
  return 0;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs
{
  std::string calib;
  std::string data;
  std::string out;
  std::string config;
  std::string split = "all";
  std::optional<double> fail_above;
  bool table1 = false;
};

int cmd_evaluate(const EvaluateArgs & a)
{
  const Loaded l = load(a.config);
  const CalibrationFile cf = load_calibration(a.calib);
  Dataset data = read_csv(a.data);
  if (a.split == "test") {
    if (std::holds_alternative<NNModel>(cf.calibration)) {
      data = subsample(data, l.config.nn.subsample_rate);
      data = split(data, l.config.nn.split).test;
    } else {
      data = cycles_in(data, l.config.model_train_cycles + 1, data.cycle_count());
    }
  }
  const EvaluationReport r = evaluate(cf.calibration, data);

  const fs::path dir(a.out);
  ensure_dir(dir);
  json report = provenance(l);
  report["calibration"] = {{"kind", kind_name(cf.calibration)}, {"config_hash", cf.config_hash}};
  report["split"] = a.split;
  report["metrics"] = to_json(r);
  write_json((dir / "report.json").string(), report);
  write_text(dir / "plot.csv", plot_csv(r));

  if (a.table1) {
    std::printf("%s", format_table1(r).c_str());
  } else {
    print_metrics("eval", r);
  }
  if (a.fail_above) {
    for (const AxisMetrics & m : r.axes) {
      if (100.0 * m.nrmsd > *a.fail_above) {
        std::fprintf(
          stderr, "axis %d (%s) NRMSD %.4f%% exceeds %.4f%%\n", m.axis, m.name.c_str(),
          100.0 * m.nrmsd, *a.fail_above);
        return kExitValidation;
      }
    }
  }
  return 0;
}

// ---------------------------------------------------------------- scenario

struct ScenarioArgs
{
  std::string kind = "overcoat";
  std::string calib;
  std::string out;
  std::string config;
  std::optional<double> coupling;
};

int cmd_scenario(const ScenarioArgs & a)
{
  const Loaded l = load(a.config);
  const CalibrationFile cf = load_calibration(a.calib);
  const fs::path dir(a.out);
  ensure_dir(dir);
  json report = provenance(l);
  report["calibration"] = {{"kind", kind_name(cf.calibration)}, {"config_hash", cf.config_hash}};
  std::string status;
  if (a.kind == "overcoat") {
    OvercoatOptions o = l.config.overcoat;
    if (a.coupling) {
      o.coupling = *a.coupling;
    }
    const OvercoatReport r = overcoat_scenario(l.config.rig(), cf.calibration, o);
    report["report"] = to_json(r);
    write_text(dir / "plot.csv", plot_csv(r.t, r.excess));
    status = r.pass ? "PASS" : "FAIL";
    for (const OvercoatAxis & ax : r.axes) {
      std::printf("%-3s rms %.4g  peak %.4g  threshold %.4g  %s\n", ax.name.c_str(), ax.rms,
        ax.peak, ax.threshold, ax.pass ? "PASS" : "FAIL");
    }
  } else {
    const WristReport r = wrist_scenario(l.config.rig(), cf.calibration, l.config.wrist);
    report["report"] = to_json(r);
    write_text(dir / "plot.csv", plot_csv(r.t, r.resolved));
    status = r.pass ? "PASS" : "FAIL";
    for (const WristAxis & ax : r.axes) {
      std::printf("%-3s peak %.4g  2sigma %.4g  %s\n", ax.name.c_str(), ax.peak, ax.threshold,
        ax.pass ? "PASS" : "FAIL");
    }
  }
  write_json((dir / "report.json").string(), report);
  std::printf("%s scenario: %s\n", a.kind.c_str(), status.c_str());
  return 0;
}

}  // namespace

int main(int argc, char ** argv)
{
  CLI::App app{"Digital twin and calibration toolkit for a proximal-shaft optical force sensor"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  SimulateArgs sa;
  auto * sim = app.add_subcommand("simulate", "Synthesize a dataset");
  sim->add_option("--kind", sa.kind, "Excitation profile")
  ->check(CLI::IsMember({"model-based", "data-driven"}));
  sim->add_option("--seed", sa.seed, "Random seed");
  sim->add_option("-o,--out", sa.out, "Output directory")->required();
  sim->add_option("--config", sa.config, "JSON config overriding the defaults");
  sim->add_flag("--force-invalid-rows", sa.force_invalid, "Keep rows outside the valid regime");

  CalibrateArgs ca;
  auto * cal = app.add_subcommand("calibrate", "Identify a calibration from a dataset");
  cal->add_option("--mode", ca.mode, "Calibration kind")->check(CLI::IsMember({"model", "nn"}));
  cal->add_option("--data", ca.data, "Dataset CSV")->required();
  cal->add_option("-o,--out", ca.out, "Calibration JSON to write")->required();
  cal->add_option("--config", ca.config, "JSON config overriding the defaults");
  cal->add_option("--starts", ca.starts, "Number of identification starts");
  cal->add_option("--subsample", ca.subsample, "Decimate to this rate (Hz) before fitting");
  cal->add_option("--seed", ca.seed, "Random seed");
  cal->add_flag("--no-mg", ca.no_mg, "Exclude the jaw effort feature");

  EvaluateArgs ea;
  auto * ev = app.add_subcommand("evaluate", "Score a calibration against a dataset");
  ev->add_option("--calib", ea.calib, "Calibration JSON")->required();
  ev->add_option("--data", ea.data, "Dataset CSV")->required();
  ev->add_option("-o,--out", ea.out, "Output directory")->required();
  ev->add_option("--config", ea.config, "JSON config overriding the defaults");
  ev->add_option("--split", ea.split, "Rows to score")->check(CLI::IsMember({"all", "test"}));
  ev->add_option("--fail-above", ea.fail_above, "Exit 2 when any axis NRMSD (%) exceeds this");
  ev->add_flag("--table1", ea.table1, "Print the metrics table");

  ScenarioArgs sc;
  auto * scn = app.add_subcommand("scenario", "Run a design-evaluation scenario");
  scn->add_option("--kind", sc.kind, "Scenario")->check(CLI::IsMember({"overcoat", "wrist"}));
  scn->add_option("--calib", sc.calib, "Calibration JSON")->required();
  scn->add_option("-o,--out", sc.out, "Output directory")->required();
  scn->add_option("--config", sc.config, "JSON config overriding the defaults");
  scn->add_option("--coupling", sc.coupling, "Outer-tube coupling factor (overcoat)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError & e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*sim) {
      return cmd_simulate(sa);
    }
    if (*cal) {
      return cmd_calibrate(ca);
    }
    if (*ev) {
      return cmd_evaluate(ea);
    }
    return cmd_scenario(sc);
  } catch (const Error & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return e.is_numerical() ? kExitNumerical : kExitValidation;
  } catch (const nlohmann::json::exception & e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  }
}
