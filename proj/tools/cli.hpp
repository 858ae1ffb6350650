#pragma once

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "examl/examl.hpp"

namespace examl::cli {

// Exit codes: 0 success, 1 runtime error, 2 usage error.
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

struct TrainArgs {
  std::string data, schema, task, mode = "fast", out, report;
  std::size_t ensemble_size = 7;
  std::uint64_t seed = 0;
  std::size_t threads = default_threads();
};

struct CvArgs {
  std::string data, schema, task, mode = "fast", report;
  std::size_t folds = 5, ensemble_size = 7;
  bool augment = false;
  std::uint64_t seed = 0;
  std::size_t threads = default_threads();
};

struct PredictArgs {
  std::string model, data, out, schema, report;
};

struct BenchmarkArgs {
  std::string suite, data_dir = ".", mode = "fast", report;
  std::size_t folds = 5, ensemble_size = 7;
  std::uint64_t seed = 0;
  std::size_t threads = default_threads();
};

inline std::string dataset_id(const std::string& path) { return std::filesystem::path(path).stem().string(); }

inline std::string fixed(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline void write_json(const std::string& path, const nlohmann::json& doc) {
  write_text_file(path, doc.dump(1) + "\n");
}

/// Loads `path` for prediction with `model`: every feature column the model was
/// trained on must be present. Other columns are ignored.
inline RawTable load_for_model(const std::string& path, const EnsembleModel& model,
                               const std::string& target_name, bool target_required) {
  const std::string text = read_text_file(path);
  const auto records = parse_csv_text(text);
  if (records.empty()) throw FormatError("CSV has no header row: " + path);
  const auto& header = records.front();

  TableSchema schema;
  std::vector<std::string> expected = model.features.numeric_names();
  for (const auto& n : model.features.numeric_names()) schema.columns.push_back({n, ColumnKind::numeric, 1, {}});
  for (const auto& c : model.features.categorical()) {
    expected.push_back(c.name());
    schema.columns.push_back({c.name(), ColumnKind::categorical, 1, c.separator()});
  }
  std::vector<std::string> missing;
  for (const auto& name : expected)
    if (std::find(header.begin(), header.end(), name) == header.end()) missing.push_back(name);
  if (!missing.empty()) {
    std::size_t present_features = 0;
    for (const auto& h : header)
      if (h != target_name) ++present_features;
    std::string msg = "shape mismatch: model expects " + std::to_string(expected.size()) +
                      " feature columns, data has " + std::to_string(present_features) + "; missing:";
    for (const auto& m : missing) msg += " " + m;
    throw ShapeError(msg);
  }
  schema.columns.push_back({target_name.empty() ? std::string("__target__") : target_name, ColumnKind::target, 1, {}});
  return table_from_csv_text(text, schema, LoadOptions{target_required, true});
}

inline void print_classification(std::ostream& out, const std::vector<std::string>& classes,
                                 const ClassificationReport& r) {
  out << "accuracy          " << fixed(r.accuracy) << "\n";
  out << "jaccard variance  " << fixed(r.jaccard_variance, 6) << "\n";
  out << "jaccard min       " << fixed(r.jaccard_min) << "\n";
  out << std::left << std::setw(20) << "class" << std::setw(10) << "jaccard" << "f1\n";
  for (std::size_t c = 0; c < classes.size(); ++c)
    out << std::left << std::setw(20) << classes[c] << std::setw(10) << fixed(r.jaccard[c])
        << fixed(r.f1[c]) << (r.empty_class_flags[c] ? "  (absent, never predicted)" : "") << "\n";
}

inline void print_regression(std::ostream& out, const RegressionReport& r) {
  out << "pearson_r  " << fixed(r.pearson_r) << "\n";
  out << "rmse       " << r.rmse << "\n";
}

inline void print_run(std::ostream& out, const RunReport& r) {
  out << r.dataset_id << " [" << to_string(r.protocol) << ", " << to_string(r.mode) << "] "
      << r.samples << " samples, training " << fixed(r.training_seconds, 2) << " s (selection "
      << fixed(r.selection_seconds, 2) << " s, final fit " << fixed(r.final_fit_seconds, 2) << " s)\n";
  if (r.classification) print_classification(out, r.classes, *r.classification);
  if (r.regression) print_regression(out, *r.regression);
}

inline int cmd_train(const TrainArgs& a, std::ostream& out) {
  const TableSchema schema = load_schema(a.schema);
  const RawTable table = load_csv(a.data, schema);
  AutoMlOptions opts;
  opts.mode = parse_mode(a.mode);
  opts.ensemble_size = a.ensemble_size;
  opts.seed = a.seed;
  opts.threads = a.threads;
  const TableFit tf = fit_table(table, parse_task(a.task), opts);
  save_model(tf.fit.model, a.out);
  if (!a.report.empty()) {
    nlohmann::json doc{{"format", "examl-train-report"},
                       {"format_version", 1},
                       {"dataset", dataset_id(a.data)},
                       {"task", a.task},
                       {"mode", a.mode},
                       {"samples", table.rows()},
                       {"ensemble_size", a.ensemble_size},
                       {"seed", a.seed},
                       {"selection", to_json(tf.fit.report)},
                       {"training_seconds", tf.fit.training_seconds},
                       {"selection_seconds", tf.fit.selection_seconds},
                       {"final_fit_seconds", tf.fit.final_fit_seconds}};
    write_json(a.report, doc);
  }
  const auto& c = tf.fit.report.chosen;
  out << "trained " << a.ensemble_size << "-member ensemble (neurons=" << c.neurons << ", alpha=" << c.alpha
      << ", " << tf.fit.report.results.size() << " candidates) on " << table.rows() << " rows in "
      << fixed(tf.fit.training_seconds, 3) << " s -> " << a.out << "\n";
  return kOk;
}

inline int cmd_predict(const PredictArgs& a, std::ostream& out) {
  const EnsembleModel model = load_model(a.model);
  const RawTable table = load_for_model(a.data, model, model.target_name, false);
  const Matrix X = model_features(model, table);
  std::ostringstream csv;
  csv << "prediction\n";
  if (model.task == TaskKind::classification) {
    for (const auto& label : predict_labels(model, X)) csv << csv_escape(label) << "\n";
  } else {
    csv << std::setprecision(17);
    for (double v : predict_regression(model, X)) csv << v << "\n";
  }
  write_text_file(a.out, csv.str());
  out << "wrote " << table.rows() << " predictions -> " << a.out << "\n";
  return kOk;
}

inline int cmd_evaluate(const PredictArgs& a, std::ostream& out) {
  const EnsembleModel model = load_model(a.model);
  const TableSchema schema = load_schema(a.schema);
  const RawTable table = load_for_model(a.data, model, schema.target().name, true);
  const Matrix X = model_features(model, table);
  nlohmann::json doc{{"format", "examl-evaluation"},
                     {"format_version", 1},
                     {"dataset", dataset_id(a.data)},
                     {"task", std::string(to_string(model.task))},
                     {"samples", table.rows()}};
  if (model.task == TaskKind::classification) {
    std::vector<std::string> all = model.codec.classes();
    all.insert(all.end(), table.targets.begin(), table.targets.end());
    const LabelCodec global = LabelCodec::from_labels(all);
    std::vector<std::size_t> truth, pred;
    for (const auto& l : table.targets) truth.push_back(global.index_of(l));
    for (const auto& l : predict_labels(model, X)) pred.push_back(global.index_of(l));
    const auto cm = confusion_matrix(truth, pred, global.size());
    const auto report = classification_report(cm);
    print_classification(out, global.classes(), report);
    doc["classes"] = global.classes();
    doc["confusion"] = to_json(cm);
    doc["metrics"] = to_json(report);
  } else {
    const auto truth = parse_regression_targets(table.targets);
    const auto pred = predict_regression(model, X);
    const auto report = regression_report(truth, pred);
    print_regression(out, report);
    doc["metrics"] = to_json(report);
  }
  if (!a.report.empty()) write_json(a.report, doc);
  return kOk;
}

inline int cmd_cv(const CvArgs& a, std::ostream& out) {
  const TableSchema schema = load_schema(a.schema);
  const RawTable table = load_csv(a.data, schema);
  CvOptions cv;
  cv.dataset_id = dataset_id(a.data);
  cv.folds = a.folds;
  if (a.augment) cv.augmentation = AugmentationSpec{};
  cv.automl.mode = parse_mode(a.mode);
  cv.automl.ensemble_size = a.ensemble_size;
  cv.automl.seed = a.seed;
  cv.automl.threads = a.threads;
  const RunReport report = run_kfold(table, parse_task(a.task), cv);
  print_run(out, report);
  if (!a.report.empty()) write_json(a.report, to_json(report));
  return kOk;
}

inline int cmd_benchmark(const BenchmarkArgs& a, std::ostream& out) {
  BenchmarkOptions opts;
  opts.suite = a.suite;
  opts.data_dir = a.data_dir;
  opts.folds = a.folds;
  opts.automl.mode = parse_mode(a.mode);
  opts.automl.ensemble_size = a.ensemble_size;
  opts.automl.seed = a.seed;
  opts.automl.threads = a.threads;
  const auto runs = run_benchmark(opts);
  for (const auto& r : runs) {
    print_run(out, r.report);
    if (r.reference > 0.0)
      out << "reference " << r.metric << " " << fixed(r.reference) << ", measured " << fixed(headline_metric(r))
          << "\n";
    out << "\n";
  }
  if (!a.report.empty()) write_json(a.report, to_json(a.suite, runs));
  return kOk;
}

/// Parses argv and dispatches. Diagnostics go to `err` as a single line.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Ensembles of extreme learning machines with automatic hyperparameter selection", "examl"};
  app.require_subcommand(1);

  const std::vector<std::string> tasks{"classification", "regression"};
  const std::vector<std::string> modes{"fast", "accurate"};

  TrainArgs train;
  auto* t = app.add_subcommand("train", "Select hyperparameters and fit an ensemble on a CSV file");
  t->add_option("--data", train.data, "Training CSV")->required()->check(CLI::ExistingFile);
  t->add_option("--schema", train.schema, "Schema JSON")->required()->check(CLI::ExistingFile);
  t->add_option("--task", train.task)->required()->check(CLI::IsMember(tasks));
  t->add_option("--mode", train.mode)->check(CLI::IsMember(modes))->capture_default_str();
  t->add_option("--ensemble-size", train.ensemble_size)->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--seed", train.seed)->capture_default_str();
  t->add_option("--out", train.out, "Model file to write")->required();
  t->add_option("--report", train.report, "Selection/timing report (JSON)");
  t->add_option("--threads", train.threads)->check(CLI::PositiveNumber);

  PredictArgs predict;
  auto* p = app.add_subcommand("predict", "Write one prediction per input row");
  p->add_option("--model", predict.model)->required()->check(CLI::ExistingFile);
  p->add_option("--data", predict.data)->required()->check(CLI::ExistingFile);
  p->add_option("--out", predict.out, "Predictions CSV")->required();

  PredictArgs evaluate;
  auto* e = app.add_subcommand("evaluate", "Score a model against labelled data");
  e->add_option("--model", evaluate.model)->required()->check(CLI::ExistingFile);
  e->add_option("--data", evaluate.data)->required()->check(CLI::ExistingFile);
  e->add_option("--schema", evaluate.schema, "Schema naming the target column")->required()->check(CLI::ExistingFile);
  e->add_option("--report", evaluate.report, "Metrics report (JSON)");

  CvArgs cv;
  auto* c = app.add_subcommand("cv", "k-fold cross-validation of the full AutoML pipeline");
  c->add_option("--data", cv.data)->required()->check(CLI::ExistingFile);
  c->add_option("--schema", cv.schema)->required()->check(CLI::ExistingFile);
  c->add_option("--task", cv.task)->required()->check(CLI::IsMember(tasks));
  c->add_option("--mode", cv.mode)->check(CLI::IsMember(modes))->capture_default_str();
  c->add_option("--folds", cv.folds)->check(CLI::Range(2, 1000000))->capture_default_str();
  c->add_flag("--augment", cv.augment, "Double training folds with 0.1% relative noise");
  c->add_option("--ensemble-size", cv.ensemble_size)->check(CLI::PositiveNumber)->capture_default_str();
  c->add_option("--seed", cv.seed)->capture_default_str();
  c->add_option("--report", cv.report, "Run report (JSON)");
  c->add_option("--threads", cv.threads)->check(CLI::PositiveNumber);

  BenchmarkArgs bench;
  std::vector<std::string> suites;
  for (const auto& s : suite_catalog()) suites.push_back(s.name);
  auto* b = app.add_subcommand("benchmark", "Run a dataset suite under its evaluation protocol");
  b->add_option("--suite", bench.suite)->required()->check(CLI::IsMember(suites));
  b->add_option("--data-dir", bench.data_dir, "Directory holding <suite>/ data folders")->capture_default_str();
  b->add_option("--mode", bench.mode)->check(CLI::IsMember(modes))->capture_default_str();
  b->add_option("--folds", bench.folds)->check(CLI::Range(2, 1000000))->capture_default_str();
  b->add_option("--ensemble-size", bench.ensemble_size)->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--seed", bench.seed)->capture_default_str();
  b->add_option("--report", bench.report, "Benchmark report (JSON)");
  b->add_option("--threads", bench.threads)->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& ex) {
    err << "examl: " << ex.what() << "\n";
    const CLI::App* sub = nullptr;
    for (const auto* s : app.get_subcommands()) sub = s;
    err << (sub ? sub->help() : app.help());
    return kUsageError;
  }

  try {
    if (*t) return cmd_train(train, out);
    if (*p) return cmd_predict(predict, out);
    if (*e) return cmd_evaluate(evaluate, out);
    if (*c) return cmd_cv(cv, out);
    if (*b) return cmd_benchmark(bench, out);
  } catch (const std::exception& ex) {
    std::string msg = ex.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "examl: error: " << msg << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace examl::cli
