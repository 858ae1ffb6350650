#pragma once

#include <array>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>
#include <openssl/evp.h>

#include "examl/csv.hpp"
#include "examl/protocol.hpp"
#include "examl/synthetic.hpp"

namespace examl {

/// Dataset suites and the protocol each one runs. Data for the UCI-style suites is
/// supplied by the user under <data-dir>/<suite>/; nothing is downloaded.
struct SuiteSpec {
  std::string name;
  TaskKind task;
  Protocol protocol;
  std::vector<std::string> files;  // relative to <data-dir>/<suite>/
  std::string metric;              // "accuracy" or "pearson_r"
  double reference_fast = 0.0;     // published result for this suite, 0 when none
  double reference_accurate = 0.0;
};

inline const std::vector<SuiteSpec>& suite_catalog() {
  static const std::vector<SuiteSpec> suites = {
      {"har", TaskKind::classification, Protocol::predefined_split, {"train.csv", "test.csv", "schema.json"},
       "accuracy", 0.9626, 0.9626},
      {"parkinsons", TaskKind::classification, Protocol::augmented_kfold, {"data.csv", "schema.json"}, "accuracy",
       0.9088, 0.9233},
      {"qsar", TaskKind::classification, Protocol::kfold, {"data.csv", "schema.json"}, "accuracy", 0.937, 0.9394},
      {"cnae9", TaskKind::classification, Protocol::augmented_kfold, {"data.csv", "schema.json"}, "accuracy", 0.7721,
       0.7721},
      {"movies", TaskKind::regression, Protocol::kfold, {"data.csv", "schema.json"}, "pearson_r", 0.82, 0.82},
      {"synthetic", TaskKind::classification, Protocol::kfold, {}, "accuracy", 0.0, 0.0},
  };
  return suites;
}

inline const SuiteSpec& find_suite(const std::string& name) {
  for (const auto& s : suite_catalog())
    if (s.name == name) return s;
  throw InvalidArgument("unknown benchmark suite '" + name + "'");
}

inline std::string sha256_file(const std::string& path) {
  const std::string data = read_text_file(path);
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed for " + path);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

/// Checks that every file the suite needs exists, and when <suite>/manifest.json
/// is present ({"sha256": {"file": "hex", ...}}), that each listed file matches.
inline std::filesystem::path check_suite_files(const SuiteSpec& suite, const std::string& data_dir) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::path(data_dir) / suite.name;
  std::vector<std::string> missing;
  for (const auto& f : suite.files)
    if (!fs::exists(dir / f)) missing.push_back((dir / f).string());
  if (!missing.empty()) {
    std::string msg = "suite '" + suite.name + "' needs user-provided files; missing:";
    for (const auto& m : missing) msg += " " + m;
    msg += " (CSV with a header row plus a schema.json naming the target column; see README)";
    throw DatasetMissing(msg);
  }
  const fs::path manifest = dir / "manifest.json";
  if (fs::exists(manifest)) {
    const auto doc = nlohmann::json::parse(read_text_file(manifest.string()));
    for (const auto& [file, expected] : doc.at("sha256").items()) {
      const auto actual = sha256_file((dir / file).string());
      if (actual != expected.get<std::string>())
        throw FormatError("checksum mismatch for " + (dir / file).string() + ": manifest " +
                          expected.get<std::string>() + ", file " + actual);
    }
  }
  return dir;
}

struct BenchmarkRun {
  RunReport report;
  std::string metric;
  double reference = 0.0;  // 0 when no published reference exists
};

struct BenchmarkOptions {
  std::string suite;
  std::string data_dir = ".";
  std::size_t folds = 5;
  AutoMlOptions automl;
};

inline std::vector<BenchmarkRun> run_synthetic_suite(const AutoMlOptions& automl, std::size_t folds) {
  std::vector<BenchmarkRun> runs;
  CvOptions cv;
  cv.folds = folds;
  cv.automl = automl;

  cv.dataset_id = "synthetic/two-gaussians";
  runs.push_back({run_kfold(synthetic::to_table(synthetic::two_gaussians(400, automl.seed + 11)),
                            TaskKind::classification, cv),
                  "accuracy", 0.0});

  cv.dataset_id = "synthetic/imbalanced-three-class";
  cv.augmentation = AugmentationSpec{};
  runs.push_back({run_kfold(synthetic::to_table(synthetic::imbalanced_three_class(300, automl.seed + 12)),
                            TaskKind::classification, cv),
                  "accuracy", 0.0});

  cv.dataset_id = "synthetic/sine";
  cv.augmentation.reset();
  runs.push_back({run_kfold(synthetic::to_table(synthetic::sine(300, automl.seed + 13)), TaskKind::regression, cv),
                  "pearson_r", 0.0});
  return runs;
}

inline std::vector<BenchmarkRun> run_benchmark(const BenchmarkOptions& options) {
  const SuiteSpec& suite = find_suite(options.suite);
  if (suite.name == "synthetic") return run_synthetic_suite(options.automl, options.folds);

  const auto dir = check_suite_files(suite, options.data_dir);
  const TableSchema schema = load_schema((dir / "schema.json").string());
  const double reference =
      options.automl.mode == SearchMode::fast ? suite.reference_fast : suite.reference_accurate;
  BenchmarkRun run{{}, suite.metric, reference};
  if (suite.protocol == Protocol::predefined_split) {
    const RawTable train = load_csv((dir / "train.csv").string(), schema);
    const RawTable test = load_csv((dir / "test.csv").string(), schema);
    run.report = run_predefined_split(train, test, suite.task, suite.name, options.automl);
  } else {
    const RawTable table = load_csv((dir / "data.csv").string(), schema);
    CvOptions cv;
    cv.dataset_id = suite.name;
    cv.folds = options.folds;
    cv.automl = options.automl;
    if (suite.protocol == Protocol::augmented_kfold) cv.augmentation = AugmentationSpec{};
    run.report = run_kfold(table, suite.task, cv);
  }
  return {std::move(run)};
}

inline double headline_metric(const BenchmarkRun& run) {
  if (run.metric == "pearson_r") return run.report.regression ? run.report.regression->pearson_r : 0.0;
  return run.report.classification ? run.report.classification->accuracy : 0.0;
}

inline nlohmann::json to_json(const std::string& suite, const std::vector<BenchmarkRun>& runs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : runs) {
    auto doc = to_json(r.report);
    doc["headline"] = {{"metric", r.metric}, {"value", headline_metric(r)}};
    if (r.reference > 0.0) doc["reference"] = {{"metric", r.metric}, {"value", r.reference}};
    arr.push_back(std::move(doc));
  }
  return {{"format", "examl-benchmark"}, {"suite", suite}, {"runs", arr}};
}

}  // namespace examl
