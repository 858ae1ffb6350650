#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "examl/elm.hpp"
#include "examl/errors.hpp"
#include "examl/parallel.hpp"
#include "examl/preprocess.hpp"
#include "examl/random.hpp"

namespace examl {

enum class SearchMode { fast, accurate };

inline std::string_view to_string(SearchMode m) { return m == SearchMode::fast ? "fast" : "accurate"; }

inline SearchMode parse_mode(std::string_view s) {
  if (s == "fast") return SearchMode::fast;
  if (s == "accurate") return SearchMode::accurate;
  throw InvalidArgument("unknown search mode '" + std::string(s) + "'");
}

/// A fitted ensemble plus everything needed to go from raw features to predictions.
struct EnsembleModel {
  std::vector<ElmModel> members;
  ScalerStats scaler;
  TaskKind task = TaskKind::classification;
  LabelCodec codec;  // classification only
  ElmConfig chosen_config;
  std::uint64_t base_seed = 0;
  SearchMode mode = SearchMode::fast;
  FeatureEncoder features;  // raw table -> feature matrix; empty when built from a matrix directly
  std::string target_name;
  // Regression targets are fit in standardized units; predictions map back with these.
  double target_mean = 0.0;
  double target_std = 1.0;

  std::size_t ensemble_size() const { return members.size(); }

  void validate() const {
    if (members.empty()) throw InvalidArgument("ensemble has no members");
    const auto& first = members.front();
    for (const auto& m : members) {
      m.validate();
      if (m.n_inputs() != first.n_inputs() || m.n_outputs() != first.n_outputs() ||
          m.neurons() != first.neurons() || m.activation != first.activation)
        throw InvalidArgument("ensemble members disagree on shape or activation");
    }
    if (scaler.features() != first.n_inputs())
      throw InvalidArgument("scaler width " + std::to_string(scaler.features()) + " differs from member inputs " +
                            std::to_string(first.n_inputs()));
    if (task == TaskKind::classification && codec.size() != static_cast<std::size_t>(first.n_outputs()))
      throw InvalidArgument("label codec size differs from member outputs");
    if (task == TaskKind::regression && first.n_outputs() != 1)
      throw InvalidArgument("regression ensembles have exactly one output");
  }
};

/// Member i is train_elm(X, Y, config with seed derive_member_seed(base_seed, i)).
inline std::vector<ElmModel> train_ensemble(const Matrix& X, const Matrix& Y, const ElmConfig& config,
                                            std::size_t ensemble_size, std::uint64_t base_seed,
                                            std::size_t threads = 1) {
  if (ensemble_size < 1) throw InvalidArgument("ensemble size must be >= 1");
  std::vector<ElmModel> members(ensemble_size);
  parallel_for(ensemble_size, threads, [&](std::size_t i) {
    ElmConfig c = config;
    c.seed = derive_member_seed(base_seed, i);
    members[i] = train_elm(X, Y, c);
  });
  return members;
}

/// Arithmetic mean of member outputs. Each cell is summed in ascending value
/// order, so the result does not depend on member order.
inline Matrix average_member_scores(const std::vector<ElmModel>& members, const Matrix& X) {
  if (members.empty()) throw InvalidArgument("ensemble has no members");
  std::vector<Matrix> outputs;
  outputs.reserve(members.size());
  for (const auto& m : members) outputs.push_back(predict_elm(m, X));
  if (outputs.size() == 1) return outputs.front();
  Matrix mean(outputs.front().rows(), outputs.front().cols());
  std::vector<double> cell(outputs.size());
  for (Eigen::Index c = 0; c < mean.cols(); ++c)
    for (Eigen::Index r = 0; r < mean.rows(); ++r) {
      for (std::size_t e = 0; e < outputs.size(); ++e) cell[e] = outputs[e](r, c);
      std::sort(cell.begin(), cell.end());
      double sum = 0.0;
      for (double v : cell) sum += v;
      mean(r, c) = sum / static_cast<double>(cell.size());
    }
  return mean;
}

inline Matrix predict_scores(const EnsembleModel& model, const Matrix& X_raw) {
  if (X_raw.cols() != model.scaler.features())
    throw ShapeError("model expects " + std::to_string(model.scaler.features()) + " features, data has " +
                     std::to_string(X_raw.cols()));
  return average_member_scores(model.members, standardize_apply(X_raw, model.scaler));
}

// Row-wise argmax; ties go to the lowest column.
inline std::vector<std::size_t> argmax_rows(const Matrix& scores) {
  std::vector<std::size_t> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.cols(); ++c)
      if (scores(r, c) > scores(r, best)) best = c;
    out[static_cast<std::size_t>(r)] = static_cast<std::size_t>(best);
  }
  return out;
}

inline std::vector<std::size_t> predict_class_indices(const EnsembleModel& model, const Matrix& X_raw) {
  if (model.task != TaskKind::classification) throw InvalidState("label prediction on a regression model");
  return argmax_rows(predict_scores(model, X_raw));
}

inline std::vector<std::string> predict_labels(const EnsembleModel& model, const Matrix& X_raw) {
  std::vector<std::string> labels;
  for (auto i : predict_class_indices(model, X_raw)) labels.push_back(model.codec.decode(i));
  return labels;
}

inline std::vector<double> predict_regression(const EnsembleModel& model, const Matrix& X_raw) {
  if (model.task != TaskKind::regression) throw InvalidState("regression prediction on a classification model");
  const Matrix scores = predict_scores(model, X_raw);
  if (scores.cols() != 1) throw InvalidState("regression model must have a single output");
  std::vector<double> out(static_cast<std::size_t>(scores.rows()));
  for (Eigen::Index r = 0; r < scores.rows(); ++r)
    out[static_cast<std::size_t>(r)] = model.target_mean + model.target_std * scores(r, 0);
  return out;
}

}  // namespace examl
