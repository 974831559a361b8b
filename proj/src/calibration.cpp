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

#include "wrench_twin/calibration.hpp"

#include <fstream>

#include <Eigen/LU>

#include "wrench_twin/errors.hpp"

namespace wrench_twin
{

using nlohmann::json;

namespace
{

template<typename Derived>
json matrix_to_json(const Eigen::MatrixBase<Derived> & m)
{
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      row.push_back(m(i, k));
    }
    rows.push_back(row);
  }
  return rows;
}

template<typename Derived>
json vector_to_json(const Eigen::MatrixBase<Derived> & v)
{
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    a.push_back(v(i));
  }
  return a;
}

const json & field(const json & j, const char * key, const std::string & where)
{
  if (!j.is_object() || !j.contains(key)) {
    throw SchemaError(where + ": missing field '" + key + "'");
  }
  return j.at(key);
}

double number(const json & j, const char * key, const std::string & where)
{
  const json & v = field(j, key, where);
  if (!v.is_number()) {
    throw SchemaError(where + "." + key + ": expected a number");
  }
  return v.get<double>();
}

template<int Rows, int Cols>
Eigen::Matrix<double, Rows, Cols> matrix_from_json(const json & j, const std::string & where)
{
  if (!j.is_array() || j.size() != Rows) {
    throw SchemaError(where + ": expected " + std::to_string(Rows) + " rows");
  }
  Eigen::Matrix<double, Rows, Cols> m;
  for (int i = 0; i < Rows; ++i) {
    if (!j[i].is_array() || j[i].size() != Cols) {
      throw SchemaError(where + ": expected " + std::to_string(Cols) + " columns");
    }
    for (int k = 0; k < Cols; ++k) {
      if (!j[i][k].is_number()) {
        throw SchemaError(where + ": non-numeric entry");
      }
      m(i, k) = j[i][k].get<double>();
    }
  }
  return m;
}

template<int Size>
Eigen::Matrix<double, Size, 1> vector_from_json(const json & j, const std::string & where)
{
  if (!j.is_array() || j.size() != Size) {
    throw SchemaError(where + ": expected " + std::to_string(Size) + " values");
  }
  Eigen::Matrix<double, Size, 1> v;
  for (int i = 0; i < Size; ++i) {
    if (!j[i].is_number()) {
      throw SchemaError(where + ": non-numeric entry");
    }
    v(i) = j[i].get<double>();
  }
  return v;
}

const char * const kFeatureNames[kFeatures] = {
  "q3_mm", "q4_rad", "mg_Nmm", "n1", "n2", "n3", "n4", "n5", "n6",
  "n1^2", "n2^2", "n3^2", "n4^2", "n5^2", "n6^2"};

/// Maps SI 6-wrench derivatives onto the calibrated axes in N, N*mm.
Eigen::Matrix<double, kOutputs, 6> target_rows(const Matrix6d & m)
{
  Eigen::Matrix<double, kOutputs, 6> out;
  for (int k = 0; k < kOutputs; ++k) {
    out.row(k) = m.row(kCalibratedAxes[k]) * (k < 2 ? 1.0 : 1e3);
  }
  return out;
}

}  // namespace

json to_json(const FitReport & r)
{
  json starts = json::array();
  for (const StartResult & s : r.starts) {
    starts.push_back({{"index", s.index}, {"converged", s.converged}, {"cost", s.cost},
        {"iterations", s.iterations}});
  }
  return {
    {"residual_mse", r.residual_mse},
    {"seed", r.seed},
    {"rows_used", r.rows_used},
    {"rows_excluded", r.rows_excluded},
    {"starts", starts},
  };
}

json to_json(const CalibrationFile & f)
{
  json j = {
    {"schema", kSchema},
    {"tool_version", f.tool_version},
    {"config_hash", f.config_hash},
  };
  if (const auto * m = std::get_if<ModelCalibration>(&f.calibration)) {
    j["kind"] = "model";
    j["params"] = {
      {"C_m", matrix_to_json(m->params.C_m)},
      {"c_x_m3", m->params.c_x},
      {"c_y_m3", m->params.c_y},
      {"l_m", m->params.l},
      {"l_os_m", m->params.l_os},
      {"l_c_m", m->params.l_c},
    };
    j["condition_cap"] = m->condition_cap;
    j["validation_sigma"] = vector_to_json(m->validation_sigma);
    if (m->fit) {
      j["fit"] = to_json(*m->fit);
    }
    return j;
  }
  const NNModel & n = std::get<NNModel>(f.calibration);
  json names = json::array();
  json excluded = json::array();
  for (int i = 0; i < kFeatures; ++i) {
    names.push_back(kFeatureNames[i]);
    if (n.excluded[i]) {
      excluded.push_back(kFeatureNames[i]);
    }
  }
  j["kind"] = "nn";
  j["activation"] = to_string(n.activation);
  j["features"] = names;
  j["excluded_features"] = excluded;
  j["scaler"] = {{"mean", vector_to_json(n.scaler.mean)}, {"std", vector_to_json(n.scaler.std)}};
  j["W1"] = matrix_to_json(n.W1);
  j["b1"] = vector_to_json(n.b1);
  j["W2"] = matrix_to_json(n.W2);
  j["b2"] = vector_to_json(n.b2);
  j["training"] = {
    {"optimizer", n.meta.optimizer},
    {"seed", n.meta.seed},
    {"epochs", n.meta.epochs},
    {"best_epoch", n.meta.best_epoch},
    {"restarts", n.meta.restarts},
    {"best_val_mse", n.meta.best_val_mse},
    {"train_rows", n.meta.train_rows},
    {"val_rows", n.meta.val_rows},
  };
  j["validation_sigma"] = vector_to_json(n.meta.val_sigma);
  return j;
}

CalibrationFile calibration_from_json(const json & j)
{
  const std::string where = "calibration";
  const json & schema = field(j, "schema", where);
  if (!schema.is_string() || schema.get<std::string>() != kSchema) {
    throw SchemaError(
            "calibration schema '" + (schema.is_string() ? schema.get<std::string>() : "?") +
            "' is not " + kSchema);
  }
  CalibrationFile f;
  f.tool_version = field(j, "tool_version", where).get<std::string>();
  f.config_hash = field(j, "config_hash", where).get<std::string>();
  const std::string kind = field(j, "kind", where).get<std::string>();

  if (kind == "model") {
    ModelCalibration m;
    const json & p = field(j, "params", where);
    m.params.C_m = matrix_from_json<6, 6>(field(p, "C_m", "params"), "params.C_m");
    m.params.c_x = number(p, "c_x_m3", "params");
    m.params.c_y = number(p, "c_y_m3", "params");
    m.params.l = number(p, "l_m", "params");
    m.params.l_os = number(p, "l_os_m", "params");
    m.params.l_c = number(p, "l_c_m", "params");
    m.condition_cap = number(j, "condition_cap", where);
    m.validation_sigma = vector_from_json<kOutputs>(field(j, "validation_sigma", where), "validation_sigma");
    if (j.contains("fit")) {
      const json & fj = j.at("fit");
      FitReport r;
      r.best = m.params;
      r.residual_mse = number(fj, "residual_mse", "fit");
      r.seed = field(fj, "seed", "fit").get<std::uint64_t>();
      r.rows_used = field(fj, "rows_used", "fit").get<std::size_t>();
      r.rows_excluded = field(fj, "rows_excluded", "fit").get<std::size_t>();
      for (const json & s : field(fj, "starts", "fit")) {
        r.starts.push_back({s.at("index").get<int>(), s.at("converged").get<bool>(),
            s.at("cost").get<double>(), s.at("iterations").get<int>()});
      }
      m.fit = r;
    }
    f.calibration = m;
    return f;
  }
  if (kind != "nn") {
    throw SchemaError("unknown calibration kind '" + kind + "'");
  }
  NNModel n;
  n.activation = activation_from_string(field(j, "activation", where).get<std::string>());
  for (const json & name : field(j, "excluded_features", where)) {
    bool found = false;
    for (int i = 0; i < kFeatures; ++i) {
      if (name.get<std::string>() == kFeatureNames[i]) {
        n.excluded[i] = true;
        found = true;
      }
    }
    if (!found) {
      throw SchemaError("unknown excluded feature '" + name.get<std::string>() + "'");
    }
  }
  const json & sc = field(j, "scaler", where);
  n.scaler.mean = vector_from_json<kFeatures>(field(sc, "mean", "scaler"), "scaler.mean");
  n.scaler.std = vector_from_json<kFeatures>(field(sc, "std", "scaler"), "scaler.std");
  if (!(n.scaler.std.array() > 0.0).all()) {
    throw SchemaError("scaler.std: every entry must be > 0");
  }
  n.W1 = matrix_from_json<kHidden, kFeatures>(field(j, "W1", where), "W1");
  n.b1 = vector_from_json<kHidden>(field(j, "b1", where), "b1");
  n.W2 = matrix_from_json<kOutputs, kHidden>(field(j, "W2", where), "W2");
  n.b2 = vector_from_json<kOutputs>(field(j, "b2", where), "b2");
  const json & t = field(j, "training", where);
  n.meta.optimizer = field(t, "optimizer", "training").get<std::string>();
  n.meta.seed = field(t, "seed", "training").get<std::uint64_t>();
  n.meta.epochs = field(t, "epochs", "training").get<int>();
  n.meta.best_epoch = field(t, "best_epoch", "training").get<int>();
  n.meta.restarts = field(t, "restarts", "training").get<int>();
  n.meta.best_val_mse = number(t, "best_val_mse", "training");
  n.meta.train_rows = field(t, "train_rows", "training").get<std::size_t>();
  n.meta.val_rows = field(t, "val_rows", "training").get<std::size_t>();
  n.meta.val_sigma = vector_from_json<kOutputs>(field(j, "validation_sigma", where), "validation_sigma");
  f.calibration = n;
  return f;
}

void write_json(const std::string & path, const json & j)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ConfigError(path, "cannot open for writing");
  }
  out << j.dump(2) << '\n';
}

json read_json(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(path, "cannot open");
  }
  try {
    return json::parse(in);
  } catch (const json::parse_error & e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void save_calibration(const std::string & path, const CalibrationFile & file)
{
  write_json(path, to_json(file));
}

CalibrationFile load_calibration(const std::string & path)
{
  try {
    return calibration_from_json(read_json(path));
  } catch (const json::exception & e) {
    throw SchemaError(path + ": " + e.what());
  }
}

TargetVector resolve(const Calibration & calib, const Record & row)
{
  if (const auto * m = std::get_if<ModelCalibration>(&calib)) {
    return to_target_units(predict(m->params, row.n, row.q3, m->condition_cap));
  }
  return infer(std::get<NNModel>(calib), featurize(row));
}

Eigen::Matrix<double, kOutputs, 6> resolve_jacobian(const Calibration & calib, const Record & row)
{
  if (const auto * m = std::get_if<ModelCalibration>(&calib)) {
    const Matrix6d M = m->params.C_m * m->params.Hc(row.q3);
    return target_rows(M.inverse());
  }
  const NNModel & n = std::get<NNModel>(calib);
  const FeatureVector z = n.scaler.transform(featurize(row));
  Eigen::Matrix<double, kHidden, 1> d = Eigen::Matrix<double, kHidden, 1>::Ones();
  if (n.activation == Activation::kTanh) {
    const Eigen::Matrix<double, kHidden, 1> h = (n.W1 * z + n.b1).array().tanh();
    d = 1.0 - h.array().square();
  }
  Eigen::Matrix<double, kHidden, 6> dh_dn;
  for (int i = 0; i < 6; ++i) {
    dh_dn.col(i) = n.W1.col(3 + i) / n.scaler.std(3 + i) +
      n.W1.col(9 + i) * (2.0 * row.n(i) / n.scaler.std(9 + i));
  }
  return n.W2 * d.asDiagonal() * dh_dn;
}

TargetVector validation_sigma(const Calibration & calib)
{
  if (const auto * m = std::get_if<ModelCalibration>(&calib)) {
    return m->validation_sigma;
  }
  return std::get<NNModel>(calib).meta.val_sigma;
}

const char * kind_name(const Calibration & calib)
{
  return std::holds_alternative<ModelCalibration>(calib) ? "model" : "nn";
}

}  // namespace wrench_twin
