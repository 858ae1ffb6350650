#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "examl/base64.hpp"
#include "examl/ensemble.hpp"
#include "examl/errors.hpp"

namespace examl {

inline constexpr int kModelFormatVersion = 1;

namespace detail {

// {"rows", "cols", "data"}: data holds rows·cols binary64 values in row-major order.
inline nlohmann::json matrix_to_json(const Matrix& m) {
  std::vector<double> flat;
  flat.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) flat.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", base64::encode_doubles(flat)}};
}

inline Matrix matrix_from_json(const nlohmann::json& j, const std::string& what) {
  const auto rows = j.at("rows").get<std::int64_t>();
  const auto cols = j.at("cols").get<std::int64_t>();
  if (rows < 0 || cols < 0) throw FormatError(what + ": negative shape");
  const auto flat = base64::decode_doubles(j.at("data").get<std::string>());
  if (flat.size() != static_cast<std::size_t>(rows * cols))
    throw FormatError(what + ": shape " + std::to_string(rows) + "x" + std::to_string(cols) + " needs " +
                      std::to_string(rows * cols) + " values, payload has " + std::to_string(flat.size()));
  Matrix m(rows, cols);
  std::size_t i = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = flat[i++];
  return m;
}

inline Vector vector_from_json(const nlohmann::json& j, const std::string& what) {
  Matrix m = matrix_from_json(j, what);
  if (m.cols() != 1) throw FormatError(what + ": expected a column vector");
  return m.col(0);
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::uint64_t parse_hex64(const std::string& s) {
  if (s.size() != 16) throw FormatError("malformed 64-bit hex value '" + s + "'");
  return std::stoull(s, nullptr, 16);
}

}  // namespace detail

inline nlohmann::json model_to_json(const EnsembleModel& model) {
  model.validate();
  using nlohmann::json;
  json doc;
  doc["format"] = "examl-model";
  doc["format_version"] = kModelFormatVersion;
  doc["task"] = std::string(to_string(model.task));
  doc["mode"] = std::string(to_string(model.mode));
  doc["chosen_config"] = {{"neurons", model.chosen_config.neurons},
                          {"alpha", model.chosen_config.alpha},
                          {"activation", std::string(to_string(model.chosen_config.activation))},
                          {"weight_scale", model.chosen_config.weight_scale}};
  doc["base_seed"] = model.base_seed;
  doc["ensemble_size"] = model.members.size();
  doc["scaler"] = {{"means", detail::matrix_to_json(model.scaler.means)},
                   {"stds", detail::matrix_to_json(model.scaler.stds)},
                   {"provenance", detail::hex64(model.scaler.provenance)}};
  doc["target_scale"] = detail::matrix_to_json(Vector{{model.target_mean, model.target_std}});
  doc["labels"] = model.task == TaskKind::classification ? json(model.codec.classes()) : json::array();

  json categorical = json::array();
  for (const auto& c : model.features.categorical())
    categorical.push_back({{"name", c.name()}, {"separator", c.separator()}, {"categories", c.categories()}});
  doc["features"] = {{"numeric", model.features.numeric_names()}, {"categorical", categorical}};
  doc["target_name"] = model.target_name;

  json members = json::array();
  for (const auto& m : model.members)
    members.push_back({{"weights", detail::matrix_to_json(m.weights)},
                       {"biases", detail::matrix_to_json(m.biases)},
                       {"beta", detail::matrix_to_json(m.beta)},
                       {"activation", std::string(to_string(m.activation))}});
  doc["members"] = std::move(members);
  return doc;
}

inline EnsembleModel model_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object() || doc.value("format", std::string{}) != "examl-model")
      throw FormatError("not an examl model document");
    const int version = doc.at("format_version").get<int>();
    if (version != kModelFormatVersion) throw UnsupportedVersion(version, kModelFormatVersion);

    EnsembleModel model;
    model.task = parse_task(doc.at("task").get<std::string>());
    model.mode = parse_mode(doc.at("mode").get<std::string>());
    const auto& cfg = doc.at("chosen_config");
    model.chosen_config.neurons = cfg.at("neurons").get<std::size_t>();
    model.chosen_config.alpha = cfg.at("alpha").get<double>();
    auto act = parse_activation(cfg.at("activation").get<std::string>());
    if (!act) throw FormatError("unknown activation in model file");
    model.chosen_config.activation = *act;
    model.chosen_config.weight_scale = cfg.at("weight_scale").get<double>();
    model.base_seed = doc.at("base_seed").get<std::uint64_t>();
    model.chosen_config.seed = 0;

    const auto& sc = doc.at("scaler");
    model.scaler.means = detail::vector_from_json(sc.at("means"), "scaler.means");
    model.scaler.stds = detail::vector_from_json(sc.at("stds"), "scaler.stds");
    model.scaler.provenance = detail::parse_hex64(sc.at("provenance").get<std::string>());
    if (model.scaler.means.size() != model.scaler.stds.size()) throw FormatError("scaler means/stds length mismatch");
    const Vector ts = detail::vector_from_json(doc.at("target_scale"), "target_scale");
    if (ts.size() != 2) throw FormatError("target_scale must hold two values");
    model.target_mean = ts(0);
    model.target_std = ts(1);
    if (model.task == TaskKind::classification)
      model.codec = LabelCodec(doc.at("labels").get<std::vector<std::string>>());

    const auto& feats = doc.at("features");
    std::vector<CategoryEncoder> cats;
    for (const auto& c : feats.at("categorical"))
      cats.emplace_back(c.at("name").get<std::string>(), c.at("categories").get<std::vector<std::string>>(),
                        c.at("separator").get<std::string>());
    model.features = FeatureEncoder(feats.at("numeric").get<std::vector<std::string>>(), std::move(cats));

    model.target_name = doc.value("target_name", std::string{});

    const auto& members = doc.at("members");
    if (members.size() != doc.at("ensemble_size").get<std::size_t>())
      throw FormatError("ensemble_size disagrees with the number of stored members");
    for (const auto& m : members) {
      ElmModel e;
      e.weights = detail::matrix_from_json(m.at("weights"), "member weights");
      e.biases = detail::vector_from_json(m.at("biases"), "member biases");
      e.beta = detail::matrix_from_json(m.at("beta"), "member beta");
      auto a = parse_activation(m.at("activation").get<std::string>());
      if (!a) throw FormatError("unknown activation in model member");
      e.activation = *a;
      model.members.push_back(std::move(e));
    }
    try {
      model.validate();
    } catch (const InvalidArgument& e) {
      throw FormatError(std::string("inconsistent model file: ") + e.what());
    }
    if (model.features.source_columns() > 0 && model.features.width() != static_cast<std::size_t>(model.scaler.features()))
      throw FormatError("feature encoder width disagrees with scaler width");
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("malformed model file: ") + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline void save_model(const EnsembleModel& model, const std::string& path) {
  write_text_file(path, model_to_json(model).dump(1) + "\n");
}

inline EnsembleModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open model file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("model file " + path + " is not valid JSON (truncated?): " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace examl
