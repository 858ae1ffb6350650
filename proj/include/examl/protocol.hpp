#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "examl/csv.hpp"
#include "examl/ensemble.hpp"
#include "examl/folds.hpp"
#include "examl/metrics.hpp"
#include "examl/preprocess.hpp"
#include "examl/search.hpp"

namespace examl {

// Evaluation protocols (k-fold, augmented k-fold, predefined split) and the run
// report they produce.

enum class Protocol { predefined_split, kfold, augmented_kfold };

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::predefined_split: return "predefined-split";
    case Protocol::kfold: return "kfold";
    case Protocol::augmented_kfold: return "augmented-kfold";
  }
  return "?";
}

struct TableFit {
  AutoMlResult fit;
  std::size_t original_rows = 0;
  std::size_t training_rows = 0;  // after augmentation
};

/// Fits the feature encoder on `table`, optionally augments the encoded matrix,
/// and runs the AutoML search. Training time covers the search and final fit only.
inline TableFit fit_table(const RawTable& table, TaskKind task, const AutoMlOptions& options,
                          const std::optional<AugmentationSpec>& augmentation = std::nullopt,
                          std::uint64_t augmentation_seed = 0) {
  if (table.targets.size() != table.rows()) throw InvalidArgument("training table has no target values");
  FeatureEncoder encoder = FeatureEncoder::fit(table);
  Matrix X = encoder.transform(table);
  std::vector<std::string> y = table.targets;
  TableFit out;
  out.original_rows = table.rows();
  if (augmentation) std::tie(X, y) = augment_duplicate_noise(X, y, *augmentation, augmentation_seed);
  out.training_rows = static_cast<std::size_t>(X.rows());
  out.fit = fit_automl(X, y, task, options);
  out.fit.model.features = std::move(encoder);
  out.fit.model.target_name = table.target_name;
  return out;
}

/// Feature matrix for `table` using the encoder stored in `model`.
inline Matrix model_features(const EnsembleModel& model, const RawTable& table) {
  if (model.features.source_columns() == 0) return table.numeric;
  return model.features.transform(table);
}

struct FoldRecord {
  std::size_t fold = 0;
  std::vector<std::size_t> test_indices;  // rows of the evaluated table
  std::size_t original_train_rows = 0;
  std::size_t train_rows = 0;
  double training_seconds = 0.0;
  double selection_seconds = 0.0;
  double final_fit_seconds = 0.0;
  SelectionReport selection;
  Candidate chosen;
  // classification
  std::vector<std::size_t> truth, predicted;  // indices into RunReport::classes
  ConfusionMatrix confusion;
  std::optional<ClassificationReport> classification;
  // regression
  std::vector<double> truth_values, predicted_values;
  std::optional<RegressionReport> regression;
};

struct RunReport {
  std::string dataset_id;
  Protocol protocol = Protocol::kfold;
  TaskKind task = TaskKind::classification;
  SearchMode mode = SearchMode::fast;
  std::size_t folds = 0;
  std::size_t ensemble_size = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::vector<std::string> classes;
  std::vector<FoldRecord> fold_records;
  ConfusionMatrix pooled_confusion;
  std::optional<ClassificationReport> classification;
  std::optional<RegressionReport> regression;
  double training_seconds = 0.0;
  double selection_seconds = 0.0;
  double final_fit_seconds = 0.0;
};

namespace detail {

inline void score_fold(FoldRecord& rec, const EnsembleModel& model, const RawTable& test, TaskKind task,
                       const LabelCodec& global) {
  const Matrix X = model_features(model, test);
  if (task == TaskKind::classification) {
    for (const auto& label : predict_labels(model, X)) rec.predicted.push_back(global.index_of(label));
    for (const auto& label : test.targets) rec.truth.push_back(global.index_of(label));
    rec.confusion = confusion_matrix(rec.truth, rec.predicted, global.size());
    rec.classification = classification_report(rec.confusion);
  } else {
    rec.predicted_values = predict_regression(model, X);
    rec.truth_values = parse_regression_targets(test.targets);
    try {
      rec.regression = regression_report(rec.truth_values, rec.predicted_values);
    } catch (const DegenerateInput&) {
      rec.regression.reset();  // a tiny fold can have constant truth or predictions
    } catch (const InvalidArgument&) {
      rec.regression.reset();
    }
  }
}

inline void record_fit(FoldRecord& rec, const TableFit& tf) {
  rec.original_train_rows = tf.original_rows;
  rec.train_rows = tf.training_rows;
  rec.training_seconds = tf.fit.training_seconds;
  rec.selection_seconds = tf.fit.selection_seconds;
  rec.final_fit_seconds = tf.fit.final_fit_seconds;
  rec.selection = tf.fit.report;
  rec.chosen = tf.fit.report.chosen;
}

inline void aggregate(RunReport& report) {
  report.training_seconds = report.selection_seconds = report.final_fit_seconds = 0.0;
  for (const auto& r : report.fold_records) {
    report.training_seconds += r.training_seconds;
    report.selection_seconds += r.selection_seconds;
    report.final_fit_seconds += r.final_fit_seconds;
  }
  if (report.task == TaskKind::classification) {
    report.pooled_confusion = ConfusionMatrix::zeros(report.classes.size());
    for (const auto& r : report.fold_records) report.pooled_confusion += r.confusion;
    report.classification = classification_report(report.pooled_confusion);
  } else {
    // Pooled over the whole dataset in row order.
    std::vector<std::pair<std::size_t, std::pair<double, double>>> rows;
    for (const auto& r : report.fold_records)
      for (std::size_t i = 0; i < r.test_indices.size(); ++i)
        rows.push_back({r.test_indices[i], {r.truth_values[i], r.predicted_values[i]}});
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> y, yhat;
    for (const auto& [idx, v] : rows) {
      y.push_back(v.first);
      yhat.push_back(v.second);
    }
    report.regression = regression_report(y, yhat);
  }
}

}  // namespace detail

struct CvOptions {
  std::string dataset_id = "dataset";
  std::size_t folds = 5;
  std::optional<AugmentationSpec> augmentation;  // applied to training folds only
  AutoMlOptions automl;
};

/// Outer k-fold: fit on k−1 folds (optionally augmented), predict the held-out
/// fold. Every row is predicted exactly once.
inline RunReport run_kfold(const RawTable& table, TaskKind task, const CvOptions& options) {
  if (table.targets.size() != table.rows()) throw InvalidArgument("cross-validation table has no target values");
  RunReport report;
  report.dataset_id = options.dataset_id;
  report.protocol = options.augmentation ? Protocol::augmented_kfold : Protocol::kfold;
  report.task = task;
  report.mode = options.automl.mode;
  report.folds = options.folds;
  report.ensemble_size = options.automl.ensemble_size;
  report.seed = options.automl.seed;
  report.samples = table.rows();
  LabelCodec global;
  if (task == TaskKind::classification) {
    global = LabelCodec::from_labels(table.targets);
    report.classes = global.classes();
  }

  const auto plan = kfold_split(table.rows(), options.folds, options.automl.seed);
  for (std::size_t f = 0; f < options.folds; ++f) {
    FoldRecord rec;
    rec.fold = f;
    rec.test_indices = plan.test_indices(f);
    const RawTable train = table.select_rows(plan.train_indices(f));
    const RawTable test = table.select_rows(rec.test_indices);
    AutoMlOptions fold_options = options.automl;
    fold_options.seed = derive_member_seed(options.automl.seed, 1000 + f);
    const auto tf = fit_table(train, task, fold_options, options.augmentation,
                              derive_member_seed(options.automl.seed, 2000 + f));
    detail::record_fit(rec, tf);
    detail::score_fold(rec, tf.fit.model, test, task, global);
    report.fold_records.push_back(std::move(rec));
  }
  detail::aggregate(report);
  return report;
}

/// Train on `train`, evaluate on `test` once.
inline RunReport run_predefined_split(const RawTable& train, const RawTable& test, TaskKind task,
                                      const std::string& dataset_id, const AutoMlOptions& options) {
  if (test.targets.size() != test.rows()) throw InvalidArgument("test table has no target values");
  RunReport report;
  report.dataset_id = dataset_id;
  report.protocol = Protocol::predefined_split;
  report.task = task;
  report.mode = options.mode;
  report.folds = 1;
  report.ensemble_size = options.ensemble_size;
  report.seed = options.seed;
  report.samples = test.rows();
  LabelCodec global;
  if (task == TaskKind::classification) {
    std::vector<std::string> all = train.targets;
    all.insert(all.end(), test.targets.begin(), test.targets.end());
    global = LabelCodec::from_labels(all);
    report.classes = global.classes();
  }
  FoldRecord rec;
  for (std::size_t i = 0; i < test.rows(); ++i) rec.test_indices.push_back(i);
  const auto tf = fit_table(train, task, options);
  detail::record_fit(rec, tf);
  detail::score_fold(rec, tf.fit.model, test, task, global);
  report.fold_records.push_back(std::move(rec));
  detail::aggregate(report);
  return report;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ConfusionMatrix& cm) { return cm.counts; }

inline nlohmann::json to_json(const ClassificationReport& r) {
  return {{"accuracy", r.accuracy},
          {"jaccard", r.jaccard},
          {"jaccard_variance", r.jaccard_variance},
          {"jaccard_min", r.jaccard_min},
          {"f1", r.f1},
          {"empty_class_flags", r.empty_class_flags}};
}

inline nlohmann::json to_json(const RegressionReport& r) { return {{"pearson_r", r.pearson_r}, {"rmse", r.rmse}}; }

inline nlohmann::json to_json(const SelectionReport& s) {
  nlohmann::json results = nlohmann::json::array();
  for (const auto& r : s.results)
    results.push_back({{"neurons", r.candidate.neurons},
                       {"alpha", r.candidate.alpha},
                       {"fold_scores", r.fold_scores},
                       {"mean_score", r.mean_score},
                       {"fit_seconds", r.fit_seconds}});
  return {{"mode", std::string(to_string(s.mode))},
          {"inner_folds", s.inner_folds},
          {"candidates", s.grid.size()},
          {"results", results},
          {"chosen", {{"neurons", s.chosen.neurons}, {"alpha", s.chosen.alpha}}},
          {"total_seconds", s.total_seconds}};
}

inline nlohmann::json to_json(const RunReport& report) {
  using nlohmann::json;
  json folds = json::array();
  for (const auto& r : report.fold_records) {
    json f{{"fold", r.fold},
           {"test_indices", r.test_indices},
           {"original_train_rows", r.original_train_rows},
           {"train_rows", r.train_rows},
           {"training_seconds", r.training_seconds},
           {"selection_seconds", r.selection_seconds},
           {"final_fit_seconds", r.final_fit_seconds},
           {"selection", to_json(r.selection)}};
    if (report.task == TaskKind::classification) {
      f["truth"] = r.truth;
      f["predicted"] = r.predicted;
      f["confusion"] = to_json(r.confusion);
      if (r.classification) f["metrics"] = to_json(*r.classification);
    } else {
      f["truth"] = r.truth_values;
      f["predicted"] = r.predicted_values;
      f["metrics"] = r.regression ? to_json(*r.regression) : json(nullptr);
    }
    folds.push_back(std::move(f));
  }
  json doc{{"format", "examl-run-report"},
           {"format_version", 1},
           {"dataset", report.dataset_id},
           {"protocol", std::string(to_string(report.protocol))},
           {"task", std::string(to_string(report.task))},
           {"mode", std::string(to_string(report.mode))},
           {"folds", report.folds},
           {"ensemble_size", report.ensemble_size},
           {"seed", report.seed},
           {"samples", report.samples},
           {"classes", report.classes},
           {"per_fold", folds},
           {"training_seconds", report.training_seconds},
           {"selection_seconds", report.selection_seconds},
           {"final_fit_seconds", report.final_fit_seconds}};
  if (report.classification) {
    doc["aggregate"] = to_json(*report.classification);
    doc["pooled_confusion"] = to_json(report.pooled_confusion);
  }
  if (report.regression) doc["aggregate"] = to_json(*report.regression);
  return doc;
}

/// Recomputes a run report's aggregate metrics from its per-fold artifacts and
/// returns the largest absolute discrepancy (0 for a consistent report).
inline double report_discrepancy(const nlohmann::json& doc) {
  double worst = 0.0;
  auto diff = [&worst](double a, double b) { worst = std::max(worst, std::abs(a - b)); };
  const bool classification = doc.at("task").get<std::string>() == "classification";
  const auto& agg = doc.at("aggregate");
  if (classification) {
    const std::size_t k = doc.at("classes").size();
    auto pooled = ConfusionMatrix::zeros(k);
    std::size_t correct = 0, total = 0;
    for (const auto& f : doc.at("per_fold")) {
      const auto truth = f.at("truth").get<std::vector<std::size_t>>();
      const auto pred = f.at("predicted").get<std::vector<std::size_t>>();
      const auto cm = confusion_matrix(truth, pred, k);
      if (cm.counts != f.at("confusion").get<std::vector<std::vector<std::uint64_t>>>()) worst = std::max(worst, 1.0);
      pooled += cm;
      for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == pred[i];
      total += truth.size();
    }
    if (pooled.counts != doc.at("pooled_confusion").get<std::vector<std::vector<std::uint64_t>>>())
      worst = std::max(worst, 1.0);
    const auto r = classification_report(pooled);
    diff(r.accuracy, agg.at("accuracy").get<double>());
    diff(static_cast<double>(correct) / static_cast<double>(total), agg.at("accuracy").get<double>());
    diff(r.jaccard_variance, agg.at("jaccard_variance").get<double>());
    diff(r.jaccard_min, agg.at("jaccard_min").get<double>());
    const auto j = agg.at("jaccard").get<std::vector<double>>();
    const auto f1 = agg.at("f1").get<std::vector<double>>();
    if (j.size() != k || f1.size() != k) return std::max(worst, 1.0);
    for (std::size_t c = 0; c < k; ++c) {
      diff(r.jaccard[c], j[c]);
      diff(r.f1[c], f1[c]);
    }
  } else {
    std::vector<std::pair<std::size_t, std::pair<double, double>>> rows;
    for (const auto& f : doc.at("per_fold")) {
      const auto idx = f.at("test_indices").get<std::vector<std::size_t>>();
      const auto truth = f.at("truth").get<std::vector<double>>();
      const auto pred = f.at("predicted").get<std::vector<double>>();
      for (std::size_t i = 0; i < idx.size(); ++i) rows.push_back({idx[i], {truth[i], pred[i]}});
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> y, yhat;
    for (const auto& [i, v] : rows) {
      y.push_back(v.first);
      yhat.push_back(v.second);
    }
    const auto r = regression_report(y, yhat);
    diff(r.pearson_r, agg.at("pearson_r").get<double>());
    diff(r.rmse, agg.at("rmse").get<double>());
  }
  return worst;
}

}  // namespace examl
