#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"

using namespace examl;
namespace fs = std::filesystem;

namespace {

const std::string kSample = std::string(EXAML_SOURCE_DIR) + "/data/two_gaussians.csv";
const std::string kSchema = std::string(EXAML_SOURCE_DIR) + "/data/two_gaussians.schema.json";

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "examl");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "examl_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

const fs::path& trained_model() {
  static const fs::path path = [] {
    const auto p = scratch("model.json");
    const auto r = invoke({"train", "--data", kSample, "--schema", kSchema, "--task", "classification", "--out",
                           p.string(), "--report", scratch("train_report.json").string(), "--threads", "1"});
    EXPECT_EQ(r.code, 0) << r.err;
    return p;
  }();
  return path;
}

}  // namespace

TEST(Cli, TrainWritesModelAndReport) {
  ASSERT_TRUE(fs::exists(trained_model()));
  const auto report = nlohmann::json::parse(read_text_file(scratch("train_report.json").string()));
  EXPECT_EQ(report["selection"]["results"].size(), 20u);
  EXPECT_GT(report["training_seconds"].get<double>(), 0.0);
}

TEST(Cli, SameSeedGivesByteIdenticalModels) {
  const auto other = scratch("model_again.json");
  const auto r = invoke({"train", "--data", kSample, "--schema", kSchema, "--task", "classification", "--out",
                         other.string(), "--threads", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_text_file(trained_model().string()), read_text_file(other.string()));
}

TEST(Cli, BadFlagIsUsageError) {
  const auto r = invoke({"train", "--data", kSample, "--bogus"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"train", "--data", kSample, "--schema", kSchema, "--task", "clustering", "--out", "x"}).code, 2);
}

TEST(Cli, PredictWritesOneRowPerInput) {
  const auto out = scratch("predictions.csv");
  const auto r = invoke({"predict", "--model", trained_model().string(), "--data", kSample, "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = parse_csv_text(read_text_file(out.string()));
  ASSERT_EQ(rows.size(), 401u);
  EXPECT_EQ(rows[0][0], "prediction");
}

TEST(Cli, EvaluateOnTrainingSample) {
  const auto report = scratch("eval.json");
  const auto r = invoke({"evaluate", "--model", trained_model().string(), "--data", kSample, "--schema", kSchema,
                         "--report", report.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("accuracy"), std::string::npos);
  const auto doc = nlohmann::json::parse(read_text_file(report.string()));
  EXPECT_GE(doc["metrics"]["accuracy"].get<double>(), 0.98);
}

TEST(Cli, WrongWidthIsShapeError) {
  const auto narrow = scratch("narrow.csv");
  write_text_file(narrow.string(), "x1,label\n1.0,a\n-1.0,b\n");
  const auto r = invoke({"predict", "--model", trained_model().string(), "--data", narrow.string(), "--out",
                         scratch("p.csv").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("expects 2"), std::string::npos);
  EXPECT_NE(r.err.find("has 1"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, RuntimeErrorIsSingleLine) {
  const auto bad = scratch("bad.csv");
  write_text_file(bad.string(), "x1,x2,label\n1,oops,a\n");
  const auto r = invoke({"train", "--data", bad.string(), "--schema", kSchema, "--task", "classification", "--out",
                         scratch("never.json").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.err.rfind("examl: error:", 0), 0u);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST(Cli, CrossValidationReport) {
  const auto report = scratch("cv.json");
  const auto r = invoke({"cv", "--data", kSample, "--schema", kSchema, "--task", "classification", "--folds", "5",
                         "--augment", "--ensemble-size", "3", "--report", report.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(read_text_file(report.string()));
  EXPECT_EQ(doc["protocol"], "augmented-kfold");
  EXPECT_LE(report_discrepancy(doc), 1e-12);
}

TEST(Cli, SyntheticBenchmarkRunsOffline) {
  const auto report = scratch("bench.json");
  const auto r = invoke({"benchmark", "--suite", "synthetic", "--ensemble-size", "3", "--report", report.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(read_text_file(report.string()));
  ASSERT_EQ(doc["runs"].size(), 3u);
  for (const auto& run : doc["runs"]) {
    EXPECT_TRUE(run.contains("aggregate"));
    EXPECT_GT(run["training_seconds"].get<double>(), 0.0);
  }
  EXPECT_TRUE(doc["runs"][0]["aggregate"].contains("jaccard_variance"));
  EXPECT_TRUE(doc["runs"][2]["aggregate"].contains("pearson_r"));
}

TEST(Cli, BenchmarkWithoutDataNamesFiles) {
  const auto r = invoke({"benchmark", "--suite", "qsar", "--data-dir", scratch("empty").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("data.csv"), std::string::npos);
}
